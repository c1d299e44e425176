#include "snbohm/cli_runner.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "snbohm/collapse.hpp"
#include "snbohm/criticality.hpp"
#include "snbohm/deviation.hpp"
#include "snbohm/evolve.hpp"
#include "snbohm/relativistic.hpp"
#include "snbohm/trajectories.hpp"
#include "snbohm/units.hpp"

namespace snbohm::cli {

namespace fs = std::filesystem;
using nlohmann::json;

std::uint64_t fnv1a64(const void* data, std::size_t size) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 14695981039346656037ull;
    for (std::size_t i = 0; i < size; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

std::string fnv1a64_hex(const std::string& data) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(data.data(), data.size())));
    return buf;
}

namespace {

// ---------------------------------------------------------------------------
// config parsing

struct RawEntry {
    std::string value;
    int line = 0;
};

struct RawConfig {
    std::string path;
    std::string text;
    std::map<std::string, RawEntry> entries;
};

bool parse_file(const std::string& path, RawConfig& out, ValidationReport& report) {
    std::ifstream in(path);
    if (!in) {
        report.issues.push_back({Issue::Kind::error, "E000", path + ": cannot open config file"});
        return false;
    }
    out.path = path;
    std::ostringstream all;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        all << line << '\n';
        std::string s = line;
        const auto hash = s.find('#');
        if (hash != std::string::npos) s.erase(hash);
        const auto notspace = [](unsigned char c) { return !std::isspace(c); };
        s.erase(s.begin(), std::find_if(s.begin(), s.end(), notspace));
        s.erase(std::find_if(s.rbegin(), s.rend(), notspace).base(), s.end());
        if (s.empty()) continue;
        const auto eq = s.find('=');
        if (eq == std::string::npos) {
            report.issues.push_back({Issue::Kind::error, "E001",
                                     path + ":" + std::to_string(lineno) +
                                         ": expected 'key = value'"});
            continue;
        }
        std::string key = s.substr(0, eq);
        std::string val = s.substr(eq + 1);
        key.erase(std::find_if(key.rbegin(), key.rend(), notspace).base(), key.end());
        val.erase(val.begin(), std::find_if(val.begin(), val.end(), notspace));
        if (key.empty()) {
            report.issues.push_back({Issue::Kind::error, "E001",
                                     path + ":" + std::to_string(lineno) + ": empty key"});
            continue;
        }
        if (out.entries.count(key)) {
            report.issues.push_back({Issue::Kind::error, "E002",
                                     path + ":" + std::to_string(lineno) + ": duplicate key '" +
                                         key + "'"});
            continue;
        }
        out.entries[key] = {val, lineno};
    }
    out.text = all.str();
    return report.ok();
}

// ---------------------------------------------------------------------------
// schema

enum class KeyType { number, integer, boolean, text, choice };
enum class Dim { none, length, time, mass };

struct KeySpec {
    std::string name;
    KeyType type = KeyType::number;
    bool required = false;
    std::string default_value;
    Dim dim = Dim::none;
    std::vector<std::string> choices;
};

const std::vector<KeySpec>& common_keys() {
    static const std::vector<KeySpec> keys = {
        {"scenario", KeyType::text, true, "", Dim::none, {}},
        {"output_dir", KeyType::text, true, "", Dim::none, {}},
        {"overwrite", KeyType::boolean, false, "false", Dim::none, {}},
        {"units", KeyType::choice, false, "natural", Dim::none, {"natural", "si"}},
        {"mass", KeyType::number, false, "1", Dim::mass, {}},
    };
    return keys;
}

const std::map<std::string, std::vector<KeySpec>>& scenario_keys() {
    static const std::map<std::string, std::vector<KeySpec>> table = {
        {"free-spread",
         {{"sigma0", KeyType::number, false, "1", Dim::length, {}},
          {"x_min", KeyType::number, false, "-25", Dim::length, {}},
          {"x_max", KeyType::number, false, "25", Dim::length, {}},
          {"n", KeyType::integer, false, "2001", Dim::none, {}},
          {"dt", KeyType::number, false, "0", Dim::time, {}},
          {"t_end", KeyType::number, false, "0", Dim::time, {}},
          {"record_every", KeyType::integer, false, "0", Dim::none, {}}}},
        {"sn-collapse",
         {{"sigma0", KeyType::number, false, "0", Dim::length, {}},
          {"r_max", KeyType::number, false, "0", Dim::length, {}},
          {"n", KeyType::integer, false, "801", Dim::none, {}},
          {"dt", KeyType::number, false, "0", Dim::time, {}},
          {"t_end", KeyType::number, false, "0", Dim::time, {}},
          {"record_every", KeyType::integer, false, "0", Dim::none, {}},
          {"G", KeyType::number, false, "1", Dim::none, {}},
          {"picard_tol", KeyType::number, false, "1e-10", Dim::none, {}},
          {"picard_max_iters", KeyType::integer, false, "25", Dim::none, {}}}},
        {"trajectories",
         {{"sigma0", KeyType::number, false, "1", Dim::length, {}},
          {"x_min", KeyType::number, false, "-25", Dim::length, {}},
          {"x_max", KeyType::number, false, "25", Dim::length, {}},
          {"n", KeyType::integer, false, "2001", Dim::none, {}},
          {"n_trajectories", KeyType::integer, false, "100", Dim::none, {}},
          {"dt", KeyType::number, false, "0", Dim::time, {}},
          {"t_end", KeyType::number, false, "0", Dim::time, {}}}},
        {"deviation",
         {{"sigma0", KeyType::number, false, "1", Dim::length, {}},
          {"x_min", KeyType::number, false, "-25", Dim::length, {}},
          {"x_max", KeyType::number, false, "25", Dim::length, {}},
          {"n", KeyType::integer, false, "2001", Dim::none, {}},
          {"dt", KeyType::number, false, "0", Dim::time, {}},
          {"t_end", KeyType::number, false, "0", Dim::time, {}}}},
        {"relativistic-demo",
         {{"metric", KeyType::choice, false, "flat", Dim::none, {"flat", "weakfield", "desitter"}},
          {"q0", KeyType::number, false, "0.01", Dim::none, {}},
          {"bump_width", KeyType::number, false, "1", Dim::length, {}},
          {"phi0", KeyType::number, false, "0.001", Dim::none, {}},
          {"hubble", KeyType::number, false, "0.05", Dim::none, {}},
          {"dtau", KeyType::number, false, "0.05", Dim::time, {}},
          {"tau_end", KeyType::number, false, "20", Dim::time, {}},
          {"eta0", KeyType::number, false, "0.001", Dim::length, {}}}},
        {"critical-sweep",
         {{"m_min", KeyType::number, false, "0.5", Dim::mass, {}},
          {"m_max", KeyType::number, false, "5", Dim::mass, {}},
          {"n_masses", KeyType::integer, false, "10", Dim::none, {}},
          {"n", KeyType::integer, false, "2001", Dim::none, {}},
          {"n_sigmas", KeyType::integer, false, "25", Dim::none, {}},
          {"sigma_lo_factor", KeyType::number, false, "0.25", Dim::none, {}},
          {"sigma_hi_factor", KeyType::number, false, "4", Dim::none, {}}}},
        {"collapse-profile",
         {{"convention", KeyType::choice, false, "mass_consistent", Dim::none,
           {"mass_consistent", "paper_literal"}},
          {"n", KeyType::integer, false, "1601", Dim::none, {}},
          {"r_max_factor", KeyType::number, false, "35", Dim::none, {}},
          {"sigma_guess_factor", KeyType::number, false, "2", Dim::none, {}},
          {"max_sweeps", KeyType::integer, false, "10000", Dim::none, {}},
          {"damping", KeyType::number, false, "0.5", Dim::none, {}}}},
    };
    return table;
}

std::size_t edit_distance(const std::string& a, const std::string& b) {
    std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

struct TypedConfig {
    std::string scenario;
    std::map<std::string, double> numbers;
    std::map<std::string, long> integers;
    std::map<std::string, bool> booleans;
    std::map<std::string, std::string> strings;
    bool si_units = false;
    double mass_si = 0.0;  // original SI mass when si_units
    std::string config_hash;
    json config_echo;

    double num(const std::string& k) const { return numbers.at(k); }
    long integer(const std::string& k) const { return integers.at(k); }
    bool boolean(const std::string& k) const { return booleans.at(k); }
    const std::string& str(const std::string& k) const { return strings.at(k); }
};

bool apply_schema(const RawConfig& raw, TypedConfig& out, ValidationReport& report) {
    auto fail = [&](const std::string& code, int line, const std::string& msg) {
        report.issues.push_back(
            {Issue::Kind::error, code, raw.path + ":" + std::to_string(line) + ": " + msg});
    };

    const auto scen_it = raw.entries.find("scenario");
    if (scen_it == raw.entries.end()) {
        report.issues.push_back({Issue::Kind::error, "E010", raw.path + ": missing 'scenario'"});
        return false;
    }
    const std::string scenario = scen_it->second.value;
    const auto& table = scenario_keys();
    if (!table.count(scenario)) {
        std::string msg = "unknown scenario '" + scenario + "' (known:";
        for (const auto& [name, _] : table) msg += " " + name;
        msg += ")";
        fail("E011", scen_it->second.line, msg);
        return false;
    }
    out.scenario = scenario;

    std::vector<KeySpec> specs = common_keys();
    const auto& extra = table.at(scenario);
    specs.insert(specs.end(), extra.begin(), extra.end());

    // unknown keys, with a nearest-name suggestion
    for (const auto& [key, entry] : raw.entries) {
        const bool known = std::any_of(specs.begin(), specs.end(),
                                       [&](const KeySpec& s) { return s.name == key; });
        if (known) continue;
        std::string best;
        std::size_t best_d = 3;
        for (const auto& s : specs) {
            const std::size_t d = edit_distance(key, s.name);
            if (d < best_d) {
                best_d = d;
                best = s.name;
            }
        }
        std::string msg = "unknown key '" + key + "'";
        if (!best.empty()) msg += " (did you mean '" + best + "'?)";
        fail("E012", entry.line, msg);
    }
    if (!report.ok()) return false;

    for (const auto& spec : specs) {
        const auto it = raw.entries.find(spec.name);
        std::string value;
        int line = 0;
        if (it == raw.entries.end()) {
            if (spec.required) {
                report.issues.push_back({Issue::Kind::error, "E013",
                                         raw.path + ": missing required key '" + spec.name + "'"});
                continue;
            }
            value = spec.default_value;
        } else {
            value = it->second.value;
            line = it->second.line;
        }
        switch (spec.type) {
            case KeyType::number: {
                char* end = nullptr;
                const double v = std::strtod(value.c_str(), &end);
                if (end == value.c_str() || *end != '\0') {
                    fail("E014", line, "key '" + spec.name + "': expected a number, got '" +
                                           value + "'");
                    break;
                }
                out.numbers[spec.name] = v;
                break;
            }
            case KeyType::integer: {
                char* end = nullptr;
                const long v = std::strtol(value.c_str(), &end, 10);
                if (end == value.c_str() || *end != '\0') {
                    fail("E014", line, "key '" + spec.name + "': expected an integer, got '" +
                                           value + "'");
                    break;
                }
                out.integers[spec.name] = v;
                break;
            }
            case KeyType::boolean: {
                if (value == "true" || value == "false") {
                    out.booleans[spec.name] = (value == "true");
                } else {
                    fail("E014", line, "key '" + spec.name + "': expected true/false, got '" +
                                           value + "'");
                }
                break;
            }
            case KeyType::text:
                out.strings[spec.name] = value;
                break;
            case KeyType::choice: {
                const bool ok = std::find(spec.choices.begin(), spec.choices.end(), value) !=
                                spec.choices.end();
                if (!ok) {
                    std::string msg = "key '" + spec.name + "': '" + value + "' not one of {";
                    for (std::size_t i = 0; i < spec.choices.size(); ++i)
                        msg += (i ? ", " : "") + spec.choices[i];
                    msg += "}";
                    fail("E015", line, msg);
                } else {
                    out.strings[spec.name] = value;
                }
                break;
            }
        }
    }
    if (!report.ok()) return false;

    // SI inputs are converted to natural units at the boundary; the natural
    // mass unit is the particle mass itself, so mass_internal = 1.
    out.si_units = (out.str("units") == "si");
    if (out.si_units) {
        if (raw.entries.count("G")) {
            fail("E016", raw.entries.at("G").line,
                 "key 'G': not allowed with units = si (G is fixed to the SI value)");
            return false;
        }
        out.mass_si = out.num("mass");
        if (!(out.mass_si > 0.0)) {
            report.issues.push_back(
                {Issue::Kind::error, "E017", raw.path + ": mass must be positive"});
            return false;
        }
        const UnitSystem us = UnitSystem::natural(out.mass_si);
        for (const auto& spec : specs) {
            if (spec.dim == Dim::none || !out.numbers.count(spec.name)) continue;
            double& v = out.numbers[spec.name];
            switch (spec.dim) {
                case Dim::length: v = us.from_si(v, Dimension::length); break;
                case Dim::time: v = us.from_si(v, Dimension::time); break;
                case Dim::mass: v = us.from_si(v, Dimension::mass); break;
                default: break;
            }
        }
    }
    if (out.numbers.count("mass") && !(out.num("mass") > 0.0)) {
        report.issues.push_back({Issue::Kind::error, "E017", raw.path + ": mass must be positive"});
        return false;
    }

    out.config_hash = fnv1a64_hex(raw.text);
    out.config_echo = json::object();
    for (const auto& [key, entry] : raw.entries) out.config_echo[key] = entry.value;
    return true;
}

void physics_sanity(const TypedConfig& cfg, ValidationReport& report) {
    auto warn = [&](const std::string& code, const std::string& msg) {
        report.issues.push_back({Issue::Kind::warning, code, msg});
    };
    const bool has_sigma = cfg.numbers.count("sigma0") && cfg.num("sigma0") > 0.0;
    if (has_sigma && cfg.numbers.count("x_min") && cfg.numbers.count("x_max")) {
        const double span = std::min(-cfg.num("x_min"), cfg.num("x_max"));
        if (span < 10.0 * cfg.num("sigma0"))
            warn("W001", "domain-too-narrow: domain extends only " +
                             std::to_string(span / cfg.num("sigma0")) +
                             " sigma0 from the packet center (want >= 10)");
    }
    if (has_sigma && cfg.numbers.count("r_max") && cfg.num("r_max") > 0.0) {
        if (cfg.num("r_max") < 10.0 * cfg.num("sigma0"))
            warn("W001", "domain-too-narrow: r_max below 10 sigma0");
    }
    if (cfg.numbers.count("dt") && cfg.num("dt") > 0.0 && cfg.integers.count("n")) {
        double extent = 0.0;
        if (cfg.numbers.count("x_max"))
            extent = cfg.num("x_max") - cfg.num("x_min");
        else if (cfg.numbers.count("r_max"))
            extent = cfg.num("r_max");
        if (extent > 0.0) {
            const double h = extent / static_cast<double>(cfg.integer("n") - 1);
            const double bound = cfg.num("mass") * h * h;  // hbar = 1 internal
            if (cfg.num("dt") > bound)
                warn("W002", "dt-above-accuracy-bound: dt = " + std::to_string(cfg.num("dt")) +
                                 " exceeds m h^2/hbar = " + std::to_string(bound));
        }
    }
}

// ---------------------------------------------------------------------------
// output helpers

std::string format_g(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

class CsvWriter {
public:
    CsvWriter(const fs::path& dir, const std::string& name, const TypedConfig& cfg,
              const std::string& conventions)
        : path_(dir / name) {
        os_ << "# snbohm " << tool_version << "\n";
        os_ << "# scenario = " << cfg.scenario << "\n";
        os_ << "# config_hash = " << cfg.config_hash << "\n";
        os_ << "# units = " << (cfg.si_units ? "si (converted at the boundary)" : "natural")
            << "\n";
        if (!conventions.empty()) os_ << "# conventions = " << conventions << "\n";
    }

    void header(const std::vector<std::string>& cols) {
        for (std::size_t i = 0; i < cols.size(); ++i) os_ << (i ? "," : "") << cols[i];
        os_ << "\n";
    }

    void row(const std::vector<double>& vals) {
        for (std::size_t i = 0; i < vals.size(); ++i) os_ << (i ? "," : "") << format_g(vals[i]);
        os_ << "\n";
    }

    fs::path finish() {
        std::ofstream f(path_, std::ios::binary);
        if (!f) throw SnError("cannot write " + path_.string());
        f << os_.str();
        return path_;
    }

private:
    fs::path path_;
    std::ostringstream os_;
};

std::string timestamp_utc() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct ScenarioOutput {
    std::vector<fs::path> files;
    json extra = json::object();
    std::string conventions;
};

// ---------------------------------------------------------------------------
// scenarios (all computation in natural internal units)

ScenarioOutput run_free_spread(const TypedConfig& cfg, const fs::path& outdir) {
    const Particle p(cfg.num("mass"));
    const double sigma0 = cfg.num("sigma0");
    const Grid grid = make_grid(Geometry::line1d, cfg.num("x_min"), cfg.num("x_max"),
                                static_cast<std::size_t>(cfg.integer("n")));
    const auto build = quantum::gaussian_amplitude(quantum::GaussianPacketSpec(sigma0, p.mass), grid);

    evolve::EvolveConfig ec;
    ec.dt = cfg.num("dt");
    ec.t_end = cfg.num("t_end") > 0.0 ? cfg.num("t_end") : 4.0 * p.mass * sigma0 * sigma0;
    ec.gravity_on = false;
    const double dt_eff = ec.dt > 0.0 ? ec.dt : evolve::default_dt(grid, p);
    const auto n_steps = static_cast<std::size_t>(std::llround(ec.t_end / dt_eff));
    ec.record_every = cfg.integer("record_every") > 0
                          ? static_cast<std::size_t>(cfg.integer("record_every"))
                          : std::max<std::size_t>(1, n_steps / 100);

    const auto rec = evolve::evolve(recompose(build.pf), p, ec, gravity::GravityParams{});

    ScenarioOutput out;
    CsvWriter csv(outdir, "width.csv", cfg, "");
    csv.header({"t", "width", "width_free_closed", "rel_err", "norm", "mean_q"});
    for (std::size_t i = 0; i < rec.times.size(); ++i) {
        const double ref = quantum::closed::free_width(rec.times[i], sigma0, p.mass);
        csv.row({rec.times[i], rec.width[i], ref, std::abs(rec.width[i] - ref) / ref,
                 rec.norm[i], rec.mean_q[i]});
    }
    out.files.push_back(csv.finish());
    double max_err = 0.0;
    for (std::size_t i = 0; i < rec.times.size(); ++i) {
        const double ref = quantum::closed::free_width(rec.times[i], sigma0, p.mass);
        max_err = std::max(max_err, std::abs(rec.width[i] - ref) / ref);
    }
    out.extra["max_width_rel_err"] = max_err;
    return out;
}

ScenarioOutput run_sn_collapse(const TypedConfig& cfg, const fs::path& outdir) {
    const Particle p(cfg.num("mass"));
    crit::CriticalityParams cp;
    cp.G = cfg.num("G");
    double sigma0 = cfg.num("sigma0");
    if (sigma0 <= 0.0) sigma0 = crit::critical_width(p, cp).sigma_star;
    const double r_max = cfg.num("r_max") > 0.0 ? cfg.num("r_max") : 16.0 * sigma0;
    const Grid grid =
        make_grid(Geometry::radial3d, 0.0, r_max, static_cast<std::size_t>(cfg.integer("n")));
    const auto build = quantum::gaussian_amplitude(quantum::GaussianPacketSpec(sigma0, p.mass), grid);

    gravity::GravityParams gp;
    gp.G = cfg.num("G");
    evolve::EvolveConfig ec;
    ec.dt = cfg.num("dt");
    ec.t_end = cfg.num("t_end") > 0.0 ? cfg.num("t_end") : 2.0 * p.mass * sigma0 * sigma0;
    ec.gravity_on = true;
    ec.picard_tol = cfg.num("picard_tol");
    ec.picard_max_iters = static_cast<std::size_t>(cfg.integer("picard_max_iters"));
    const double dt_eff = ec.dt > 0.0 ? ec.dt : evolve::default_dt(grid, p);
    const auto n_steps = static_cast<std::size_t>(std::llround(ec.t_end / dt_eff));
    ec.record_every = cfg.integer("record_every") > 0
                          ? static_cast<std::size_t>(cfg.integer("record_every"))
                          : std::max<std::size_t>(1, n_steps / 100);

    const auto rec = evolve::evolve(recompose(build.pf), p, ec, gp);

    ScenarioOutput out;
    out.conventions = "U_g = -G m^2 int rho/|x-x'|; radial shell theorem";
    CsvWriter csv(outdir, "width.csv", cfg, out.conventions);
    csv.header({"t", "width", "width_free_closed", "growth_ratio_vs_free", "norm", "mean_q",
                "mean_ug"});
    for (std::size_t i = 0; i < rec.times.size(); ++i) {
        const double ref = quantum::closed::free_width(rec.times[i], sigma0, p.mass);
        const double gr = (ref > sigma0) ? (rec.width[i] - sigma0) / (ref - sigma0) : 0.0;
        csv.row({rec.times[i], rec.width[i], ref, gr, rec.norm[i], rec.mean_q[i],
                 rec.mean_ug[i]});
    }
    out.files.push_back(csv.finish());
    out.extra["sigma0"] = sigma0;
    out.extra["final_width"] = rec.width.back();
    return out;
}

ScenarioOutput run_trajectories(const TypedConfig& cfg, const fs::path& outdir) {
    const Particle p(cfg.num("mass"));
    const double sigma0 = cfg.num("sigma0");
    const Grid grid = make_grid(Geometry::line1d, cfg.num("x_min"), cfg.num("x_max"),
                                static_cast<std::size_t>(cfg.integer("n")));
    const quantum::GaussianPacketSpec spec(sigma0, p.mass);
    const traj::FreeGaussianProvider provider(spec, grid);

    const double t_end =
        cfg.num("t_end") > 0.0 ? cfg.num("t_end") : 4.0 * p.mass * sigma0 * sigma0;
    const double dt = cfg.num("dt") > 0.0 ? cfg.num("dt") : t_end / 1000.0;
    const auto K = static_cast<std::size_t>(cfg.integer("n_trajectories"));

    const auto x0s = traj::sample_initial(provider.fields(0.0).rho, K);
    const auto ens = traj::integrate_ensemble(x0s, provider, p, dt, t_end);
    const auto nc = traj::check_non_crossing(ens);

    ScenarioOutput out;
    CsvWriter csv(outdir, "trajectories.csv", cfg, "");
    {
        std::vector<std::string> cols = {"t"};
        for (std::size_t k = 0; k < K; ++k) cols.push_back("x" + std::to_string(k));
        csv.header(cols);
        const std::size_t stride = std::max<std::size_t>(1, ens.times.size() / 200);
        for (std::size_t i = 0; i < ens.times.size(); i += stride) {
            std::vector<double> row = {ens.times[i]};
            for (std::size_t k = 0; k < K; ++k) row.push_back(ens.positions[k][i]);
            csv.row(row);
        }
    }
    out.files.push_back(csv.finish());

    CsvWriter sum(outdir, "summary.csv", cfg, "");
    sum.header({"k", "x0", "max_rel_err_vs_closed_form"});
    double global_err = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
        double err = 0.0;
        for (std::size_t i = 0; i < ens.times.size(); ++i) {
            const double ref =
                traj::analytic_gaussian_trajectory(ens.x0[k], ens.times[i], p.mass, sigma0);
            if (std::abs(ref) > 1e-12)
                err = std::max(err, std::abs(ens.positions[k][i] - ref) / std::abs(ref));
        }
        sum.row({static_cast<double>(k), ens.x0[k], err});
        global_err = std::max(global_err, err);
    }
    out.files.push_back(sum.finish());
    out.extra["non_crossing"] = nc.ok;
    out.extra["max_rel_err"] = global_err;
    return out;
}

ScenarioOutput run_deviation(const TypedConfig& cfg, const fs::path& outdir) {
    const Particle p(cfg.num("mass"));
    const double sigma0 = cfg.num("sigma0");
    const Grid grid = make_grid(Geometry::line1d, cfg.num("x_min"), cfg.num("x_max"),
                                static_cast<std::size_t>(cfg.integer("n")));
    const quantum::GaussianPacketSpec spec(sigma0, p.mass);

    const double t_end =
        cfg.num("t_end") > 0.0 ? cfg.num("t_end") : 2.0 * p.mass * sigma0 * sigma0;
    const double dt = cfg.num("dt") > 0.0 ? cfg.num("dt") : t_end / 2000.0;

    // tidal field along the packet center from the evolving closed-form
    // fields, on a grid sized to the instantaneous width
    auto tidal_at = [&](double t) {
        const double st = quantum::closed::free_width(t, sigma0, p.mass);
        const Grid gt = make_grid(Geometry::line1d, -12.0 * st, 12.0 * st, 1401);
        const PolarFields pf = quantum::free_gaussian_fields(spec, gt, t);
        const auto qp = quantum::quantum_potential(pf, p);
        const RealField phi_zero(gt);
        const auto tf = dev::tidal_field(qp.Q, phi_zero, p, dev::PhiConvention::paper_positive);
        return interp_linear(tf.D, 0.0);
    };

    const auto x0s = traj::sample_initial(quantum::free_gaussian_fields(spec, grid, 0.0).rho, 11);
    const double eta0 = x0s[6] - x0s[5];
    const auto series = dev::integrate_deviation(eta0, 0.0, tidal_at, dt, t_end);

    ScenarioOutput out;
    out.conventions = "D = d/dx[-(1/m) dQ/dx - dphi_newton/dx]";
    CsvWriter csv(outdir, "deviation.csv", cfg, out.conventions);
    csv.header({"t", "eta", "eta_dilation_closed", "rel_err"});
    for (std::size_t i = 0; i < series.times.size(); ++i) {
        const double ref =
            eta0 * quantum::closed::free_width(series.times[i], sigma0, p.mass) / sigma0;
        csv.row({series.times[i], series.eta[i], ref, std::abs(series.eta[i] - ref) / ref});
    }
    out.files.push_back(csv.finish());

    const Grid g0 = make_grid(Geometry::line1d, -12.0 * sigma0, 12.0 * sigma0, 1401);
    const PolarFields pf0 = quantum::free_gaussian_fields(spec, g0, 0.0);
    const auto qp0 = quantum::quantum_potential(pf0, p);
    const RealField phi0_zero(g0);
    const auto tf0 = dev::tidal_field(qp0.Q, phi0_zero, p, dev::PhiConvention::paper_positive);
    CsvWriter tcsv(outdir, "tidal.csv", cfg, out.conventions);
    tcsv.header({"x", "D"});
    for (std::size_t i = 0; i < g0.n(); i += 8) tcsv.row({g0.x(i), tf0.D[i]});
    out.files.push_back(tcsv.finish());
    return out;
}

ScenarioOutput run_relativistic_demo(const TypedConfig& cfg, const fs::path& outdir) {
    const std::string metric_name = cfg.str("metric");
    rel::MetricModel metric = rel::MetricModel::minkowski();
    rel::QFieldModel qf = rel::QFieldModel::zero();
    if (metric_name == "flat") {
        qf = rel::QFieldModel::gaussian_bump(cfg.num("q0"), cfg.num("bump_width"));
    } else if (metric_name == "weakfield") {
        const double phi0 = cfg.num("phi0");
        const double w = cfg.num("bump_width");
        metric = rel::MetricModel::weak_field(
            [phi0, w](const rel::Vec4& x) {
                return -phi0 * std::exp(-x[1] * x[1] / (2.0 * w * w));
            },
            [phi0, w](const rel::Vec4& x) {
                rel::Vec4 g{};
                g[1] = phi0 * x[1] / (w * w) * std::exp(-x[1] * x[1] / (2.0 * w * w));
                return g;
            });
    } else {
        metric = rel::MetricModel::de_sitter(cfg.num("hubble"));
    }

    rel::RelCongruenceState s0;
    s0.x = {0.0, 0.0, 0.0, 0.0};
    s0.u = {0.0, 0.0, 0.0, 0.0};
    rel::normalize_u0(metric.metric(s0.x), s0.u);
    s0.eta = {0.0, cfg.num("eta0"), 0.0, 0.0};
    if (metric_name == "desitter") {
        // comoving neighbors: D eta/dtau = (adot/a) eta
        s0.v = {0.0, cfg.num("hubble") * cfg.num("eta0"), 0.0, 0.0};
    } else {
        s0.v = {0.0, 0.0, 0.0, 0.0};
    }

    const auto series =
        rel::integrate_congruence(s0, metric, qf, cfg.num("dtau"), cfg.num("tau_end"));

    ScenarioOutput out;
    out.conventions = "signature (+,-,-,-); Jacobi term R^mu_rho-lam-nu u^rho u^lam eta^nu";
    CsvWriter csv(outdir, "congruence.csv", cfg, out.conventions);
    csv.header({"tau", "t", "x", "u0", "ux", "eta_x", "v_x"});
    for (const auto& st : series.states)
        csv.row({st.tau, st.x[0], st.x[1], st.u[0], st.u[1], st.eta[1], st.v[1]});
    out.files.push_back(csv.finish());
    out.extra["max_uu_drift"] = series.max_uu_drift;
    out.extra["max_ueta_drift"] = series.max_ueta_drift;
    return out;
}

ScenarioOutput run_critical_sweep(const TypedConfig& cfg, const fs::path& outdir) {
    crit::CriticalityParams cp;
    cp.grid_n = static_cast<std::size_t>(cfg.integer("n"));

    const double m_min = cfg.num("m_min"), m_max = cfg.num("m_max");
    const auto n_masses = static_cast<std::size_t>(cfg.integer("n_masses"));
    if (!(m_min > 0.0) || !(m_max > m_min) || n_masses < 2)
        throw ContractError("critical-sweep: need 0 < m_min < m_max and n_masses >= 2");

    ScenarioOutput out;
    std::vector<double> masses(n_masses), stars(n_masses);
    CsvWriter csv(outdir, "sigma_star.csv", cfg, "");
    csv.header({"m", "sigma_star", "diosi_width", "coefficient_c"});
    for (std::size_t i = 0; i < n_masses; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(n_masses - 1);
        const double m = std::exp(std::log(m_min) + t * (std::log(m_max) - std::log(m_min)));
        const Particle p(m);
        const double sd = crit::diosi_width(m);
        const auto rep = crit::critical_width(p, cp, cfg.num("sigma_lo_factor") * sd,
                                              cfg.num("sigma_hi_factor") * sd);
        masses[i] = m;
        stars[i] = rep.sigma_star;
        csv.row({m, rep.sigma_star, sd, rep.coefficient_c});
    }
    out.files.push_back(csv.finish());

    const Particle p_ref(masses.front());
    const double sd_ref = crit::diosi_width(masses.front());
    const auto prof = crit::energy_profile(p_ref, 0.25 * sd_ref, 4.0 * sd_ref,
                                           static_cast<std::size_t>(cfg.integer("n_sigmas")), cp);
    CsvWriter pcsv(outdir, "energy_profile.csv", cfg, "");
    pcsv.header({"sigma", "mean_q", "mean_ug", "energy"});
    for (std::size_t i = 0; i < prof.sigma.size(); ++i)
        pcsv.row({prof.sigma[i], prof.mean_q[i], prof.mean_ug[i], prof.energy[i]});
    out.files.push_back(pcsv.finish());

    out.extra["sigma_star_mass_slope"] = crit::loglog_slope(masses, stars);
    out.extra["slope_mean_q"] = prof.slope_q;
    out.extra["slope_mean_ug"] = prof.slope_ug;
    return out;
}

ScenarioOutput run_collapse_profile(const TypedConfig& cfg, const fs::path& outdir) {
    const Particle p(cfg.num("mass"));
    const auto convention = cfg.str("convention") == "paper_literal"
                                ? collapse::PoissonConvention::paper_literal
                                : collapse::PoissonConvention::mass_consistent;
    collapse::CollapseParams params;
    params.grid_n = static_cast<std::size_t>(cfg.integer("n"));
    params.r_max_factor = cfg.num("r_max_factor");
    params.max_sweeps = static_cast<std::size_t>(cfg.integer("max_sweeps"));
    params.damping = cfg.num("damping");

    const int k = collapse::mass_power(convention);
    const double scale = 1.0 / std::pow(p.mass, k + 1);
    const auto prof = collapse::solve_collapse_profile(
        p, convention, cfg.num("sigma_guess_factor") * scale, params);

    ScenarioOutput out;
    out.conventions = prof.convention_note;
    CsvWriter csv(outdir, "profile.csv", cfg, out.conventions);
    csv.header({"r", "rho", "Q", "residual"});
    for (std::size_t i = 0; i < prof.grid.n(); i += 4)
        csv.row({prof.grid.x(i), prof.rho[i], prof.Q[i], prof.residual[i]});
    out.files.push_back(csv.finish());

    CsvWriter conv(outdir, "convergence.csv", cfg, out.conventions);
    conv.header({"sweep", "energy", "residual_norm"});
    for (std::size_t i = 0; i < prof.trace_energy.size(); ++i)
        conv.row({static_cast<double>(i + 1), prof.trace_energy[i], prof.trace_residual[i]});
    out.files.push_back(conv.finish());

    out.extra["width"] = prof.width;
    out.extra["energy"] = prof.energy;
    out.extra["residual_norm"] = prof.residual_norm;
    out.extra["residual_tol"] = prof.residual_tol;
    out.extra["sweeps"] = prof.sweeps;
    return out;
}

ScenarioOutput dispatch(const TypedConfig& cfg, const fs::path& outdir) {
    if (cfg.scenario == "free-spread") return run_free_spread(cfg, outdir);
    if (cfg.scenario == "sn-collapse") return run_sn_collapse(cfg, outdir);
    if (cfg.scenario == "trajectories") return run_trajectories(cfg, outdir);
    if (cfg.scenario == "deviation") return run_deviation(cfg, outdir);
    if (cfg.scenario == "relativistic-demo") return run_relativistic_demo(cfg, outdir);
    if (cfg.scenario == "critical-sweep") return run_critical_sweep(cfg, outdir);
    if (cfg.scenario == "collapse-profile") return run_collapse_profile(cfg, outdir);
    throw ContractError("unknown scenario " + cfg.scenario);
}

fs::path resolve_outdir(const TypedConfig& cfg) {
    fs::path dir = cfg.str("output_dir");
    if (dir.is_relative()) {
        if (const char* root = std::getenv(output_root_env)) dir = fs::path(root) / dir;
    }
    return dir;
}

}  // namespace

ValidationReport validate_file(const std::string& config_path) {
    ValidationReport report;
    RawConfig raw;
    if (!parse_file(config_path, raw, report)) return report;
    TypedConfig cfg;
    if (!apply_schema(raw, cfg, report)) return report;
    physics_sanity(cfg, report);
    return report;
}

int run(const std::string& config_path) {
    ValidationReport report;
    RawConfig raw;
    TypedConfig cfg;
    if (!parse_file(config_path, raw, report) || !apply_schema(raw, cfg, report)) {
        for (const auto& issue : report.issues) std::cerr << "error: " << issue.message << "\n";
        return 2;
    }
    physics_sanity(cfg, report);
    for (const auto& issue : report.issues)
        if (issue.kind == Issue::Kind::warning)
            std::cerr << "warning " << issue.code << ": " << issue.message << "\n";

    const fs::path outdir = resolve_outdir(cfg);
    std::error_code ec;
    fs::create_directories(outdir, ec);
    if (ec) {
        std::cerr << "error: cannot create output directory " << outdir << "\n";
        return 2;
    }
    if (!cfg.boolean("overwrite")) {
        if (fs::exists(outdir / "manifest.json")) {
            std::cerr << "error: output already exists in " << outdir
                      << " and overwrite = false\n";
            return 2;
        }
    }

    const std::string started = timestamp_utc();
    ScenarioOutput result;
    try {
        result = dispatch(cfg, outdir);
    } catch (const SnError& e) {
        std::ofstream diag(outdir / "diagnostics.txt");
        diag << "snbohm " << tool_version << " numerical abort\n"
             << "scenario: " << cfg.scenario << "\n"
             << "config_hash: " << cfg.config_hash << "\n"
             << "error: " << e.what() << "\n";
        std::cerr << "numerical abort: " << e.what() << "\n";
        return 3;
    }

    json manifest;
    manifest["tool_version"] = tool_version;
    manifest["scenario"] = cfg.scenario;
    manifest["config"] = cfg.config_echo;
    manifest["config_hash"] = cfg.config_hash;
    manifest["units"] = cfg.si_units ? "si" : "natural";
    manifest["started_utc"] = started;
    manifest["finished_utc"] = timestamp_utc();
    manifest["conventions"] = result.conventions;
    manifest["results"] = result.extra;
    json outputs = json::array();
    for (const auto& f : result.files) {
        std::ifstream in(f, std::ios::binary);
        std::ostringstream data;
        data << in.rdbuf();
        const std::string bytes = data.str();
        outputs.push_back({{"file", f.filename().string()},
                           {"bytes", bytes.size()},
                           {"fnv1a64", fnv1a64_hex(bytes)}});
    }
    manifest["outputs"] = outputs;

    // atomic write: tmp + rename
    const fs::path mpath = outdir / "manifest.json";
    const fs::path tmp = outdir / "manifest.json.tmp";
    {
        std::ofstream mf(tmp, std::ios::binary);
        mf << manifest.dump(2) << "\n";
    }
    fs::rename(tmp, mpath);
    return 0;
}

std::vector<std::string> list_scenarios() {
    std::vector<std::string> names;
    for (const auto& [name, _] : scenario_keys()) names.push_back(name);
    return names;
}

}  // namespace snbohm::cli
