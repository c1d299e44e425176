// Acceptance suite: one pass/fail line per criterion.
//   acceptance       -> run all nine criteria
//   acceptance <k>   -> run criterion k only (exit status = number of failures)
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "snbohm/collapse.hpp"
#include "snbohm/criticality.hpp"
#include "snbohm/deviation.hpp"
#include "snbohm/evolve.hpp"
#include "snbohm/relativistic.hpp"
#include "snbohm/trajectories.hpp"

using namespace snbohm;
using quantum::GaussianPacketSpec;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

struct Check {
    std::ostringstream detail;
    bool pass = true;

    void expect(bool ok, const std::string& what) {
        pass = pass && ok;
        detail << (ok ? "    ok:   " : "    FAIL: ") << what << "\n";
    }
    Outcome done() const { return {pass, detail.str()}; }
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

ComplexField gaussian_state(const Grid& g, double sigma, double m) {
    return recompose(quantum::gaussian_amplitude(GaussianPacketSpec(sigma, m), g).pf);
}

// 1. Free-packet law: sigma(t) = sigma0 sqrt(1 + (hbar t / 2 m sigma0^2)^2)
// to 1e-3 over t in [0, 4 m sigma0^2 / hbar] at n = 2001, under 10 s.
Outcome criterion_1() {
    Check c;
    const auto t0 = std::chrono::steady_clock::now();
    const Particle p(1.0);
    const double sigma0 = 1.0;
    const Grid g = make_grid(Geometry::line1d, -25.0, 25.0, 2001);
    evolve::EvolveConfig ec;
    ec.t_end = 4.0 * p.mass * sigma0 * sigma0;
    ec.record_every = 640;
    const auto rec =
        evolve::evolve(gaussian_state(g, sigma0, p.mass), p, ec, gravity::GravityParams{});

    double max_err = 0.0;
    for (std::size_t i = 0; i < rec.times.size(); ++i) {
        const double ref = quantum::closed::free_width(rec.times[i], sigma0, p.mass);
        max_err = std::max(max_err, std::abs(rec.width[i] - ref) / ref);
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    c.expect(max_err <= 1e-3, "max width relative error " + fmt(max_err) + " <= 1e-3");
    c.expect(secs <= 10.0, "runtime " + fmt(secs) + " s <= 10 s at n = 2001");
    return c.done();
}

// 2. Trajectory oracle: 100 Bohmian trajectories match the closed form to
// 1e-3; the central trajectory is straight to 1e-12; non-crossing throughout.
Outcome criterion_2() {
    Check c;
    const Particle p(1.0);
    const double sigma0 = 1.0;
    const Grid g = make_grid(Geometry::line1d, -25.0, 25.0, 2001);
    const traj::FreeGaussianProvider provider(GaussianPacketSpec(sigma0, p.mass), g);

    const auto x0s = traj::sample_initial(provider.fields(0.0).rho, 100);
    const auto ens = traj::integrate_ensemble(x0s, provider, p, 0.004, 4.0);

    double max_rel = 0.0;
    for (std::size_t k = 0; k < x0s.size(); ++k)
        for (std::size_t i = 0; i < ens.times.size(); ++i) {
            const double ref =
                traj::analytic_gaussian_trajectory(x0s[k], ens.times[i], p.mass, sigma0);
            max_rel = std::max(max_rel, std::abs(ens.positions[k][i] - ref) / std::abs(ref));
        }
    c.expect(max_rel <= 1e-3,
             "max trajectory relative error over 100 paths " + fmt(max_rel) + " <= 1e-3");

    const auto central = traj::integrate_ensemble({0.0}, provider, p, 0.004, 4.0);
    double max_central = 0.0;
    for (const double x : central.positions[0]) max_central = std::max(max_central, std::abs(x));
    c.expect(max_central <= 1e-12, "x0 = 0 stays straight: |x| <= " + fmt(max_central));

    c.expect(traj::check_non_crossing(ens).ok, "non-crossing holds at every recorded step");
    return c.done();
}

// 3. Scaling exponents of <Q> and <U_g> plus the exact 1D coefficient.
Outcome criterion_3() {
    Check c;
    const Particle p(1.0);
    std::vector<double> sigmas, qvals, uvals;
    for (int i = 0; i <= 20; ++i) {
        const double sigma = std::pow(10.0, static_cast<double>(i) / 20.0);
        const Grid g = make_grid(Geometry::radial3d, 0.0, 12.0 * sigma, 2001);
        const auto pf = quantum::gaussian_amplitude(GaussianPacketSpec(sigma, p.mass), g).pf;
        sigmas.push_back(sigma);
        qvals.push_back(quantum::mean_quantum_potential(pf, p));
        uvals.push_back(gravity::mean_self_energy(pf.rho, p, gravity::GravityParams{}));
    }
    const double slope_q = oracles::loglog_slope(sigmas, qvals);
    const double slope_u = oracles::loglog_slope(sigmas, uvals);
    c.expect(std::abs(slope_q + 2.0) <= 0.01, "<Q> slope " + fmt(slope_q) + " = -2.00 +/- 0.01");
    c.expect(std::abs(slope_u + 1.0) <= 0.01,
             "<U_g> slope " + fmt(slope_u) + " = -1.00 +/- 0.01");

    // exact 1D coefficient vs an independent Simpson oracle of the closed forms
    const double sigma = 1.0;
    const double oracle = oracles::simpson(
        [&](double x) {
            return oracles::gauss_rho_1d(x, sigma) * quantum::closed::q_1d(x, sigma, p.mass);
        },
        -14.0, 14.0, 20000);
    const Grid g1 = make_grid(Geometry::line1d, -14.0, 14.0, 16001);
    const double impl = quantum::mean_quantum_potential(
        quantum::gaussian_amplitude(GaussianPacketSpec(sigma, p.mass), g1).pf, p);
    const double rel = std::abs(impl - oracle) / oracle;
    c.expect(std::abs(oracle - 0.125) <= 1e-10 * 0.125,
             "oracle reproduces hbar^2/(8 m sigma0^2)");
    c.expect(rel <= 1e-6, "<Q> vs quadrature oracle: relative gap " + fmt(rel) + " <= 1e-6");
    return c.done();
}

// 4. Diosi criterion: sigma_star ~ m^-3 with stable coefficient c.
Outcome criterion_4() {
    Check c;
    const auto t0 = std::chrono::steady_clock::now();
    crit::CriticalityParams cp;
    cp.grid_n = 3201;
    std::vector<double> masses, stars, coeffs;
    for (int i = 0; i < 10; ++i) {
        const double t = static_cast<double>(i) / 9.0;
        const double m = std::exp(std::log(0.5) + t * (std::log(5.0) - std::log(0.5)));
        const double sd = crit::diosi_width(m);
        const auto rep = crit::critical_width(Particle(m), cp, 0.25 * sd, 4.0 * sd);
        masses.push_back(m);
        stars.push_back(rep.sigma_star);
        coeffs.push_back(rep.coefficient_c);
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const double slope = oracles::loglog_slope(masses, stars);
    c.expect(std::abs(slope + 3.0) <= 0.01, "sigma_star(m) slope " + fmt(slope) + " = -3.00 +/- 0.01");

    double c_lo = coeffs[0], c_hi = coeffs[0];
    for (const double v : coeffs) {
        c_lo = std::min(c_lo, v);
        c_hi = std::max(c_hi, v);
    }
    const double spread = (c_hi - c_lo) / c_lo;
    c.expect(spread <= 1e-3, "c = " + fmt(coeffs[0]) + " stable across masses (spread " +
                                 fmt(spread) + " <= 1e-3)");
    c.expect(secs <= 60.0, "10-point mass sweep in " + fmt(secs) + " s <= 60 s");
    return c.done();
}

// 5. Critical body size lands at the 1e-5 cm order for ordinary density.
Outcome criterion_5() {
    Check c;
    const double rc = crit::critical_size(1000.0);
    c.expect(rc >= 3e-8 && rc <= 3e-7,
             "critical_size(1000 kg/m^3) = " + fmt(rc * 100.0) + " cm in [3e-6, 3e-5] cm");
    return c.done();
}

// 6. Balance condition: phi = Q/m annihilates the tide and freezes the
// deviation; the width minimizing ||r||_rho is compared against sigma_star.
Outcome criterion_6() {
    Check c;
    const Particle p(1.0);
    crit::CriticalityParams cp;
    cp.grid_n = 1601;
    const double sigma_star = crit::critical_width(p, cp).sigma_star;

    {
        const double sigma = 1.3;
        const Grid g = make_grid(Geometry::radial3d, 0.0, 16.0 * sigma, 1601);
        const auto pf = quantum::gaussian_amplitude(GaussianPacketSpec(sigma, p.mass), g).pf;
        const auto qp = quantum::quantum_potential(pf, p);
        RealField phi(g);
        for (std::size_t i = 0; i < g.n(); ++i) phi[i] = qp.Q[i] / p.mass;
        const auto tf = dev::tidal_field(qp.Q, phi, p, dev::PhiConvention::paper_positive);
        double d_max = 0.0;
        for (std::size_t i = 0; i < g.n(); ++i) d_max = std::max(d_max, std::abs(tf.D[i]));
        const double tidal_scale = 1.0 / (4.0 * p.mass * p.mass * std::pow(sigma, 4));
        c.expect(d_max <= 1e-9 * tidal_scale,
                 "balanced tidal field: max |D| = " + fmt(d_max) + " (scale " +
                     fmt(tidal_scale) + ")");

        const double d_fid = interp_linear(tf.D, sigma);
        const auto series =
            dev::integrate_deviation(1.0, 0.0, [&](double) { return d_fid; }, 0.01, 3.5);
        double eta_drift = 0.0;
        for (const double e : series.eta) eta_drift = std::max(eta_drift, std::abs(e - 1.0));
        c.expect(eta_drift <= 1e-10,
                 "balanced deviation stays constant: drift " + fmt(eta_drift) + " <= 1e-10");
    }

    {
        // decade scan of ||grad Q - m grad phi_paper||_rho around sigma_star
        const double lo = sigma_star / std::sqrt(10.0);
        const double hi = sigma_star * std::sqrt(10.0);
        gravity::GravityParams gp;
        double best_sigma = lo, best_norm = 1e300, first_norm = 0.0, last_norm = 0.0;
        const int n_scan = 41;
        for (int i = 0; i < n_scan; ++i) {
            const double t = static_cast<double>(i) / (n_scan - 1);
            const double sigma = std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo)));
            const Grid g = make_grid(Geometry::radial3d, 0.0, 12.0 * sigma, 2001);
            const auto pf = quantum::gaussian_amplitude(GaussianPacketSpec(sigma, p.mass), g).pf;
            const auto qp = quantum::quantum_potential(pf, p);
            const RealField phi = gravity::potential_field(pf.rho, p, gp);
            const auto res = dev::balance_residual(qp.Q, phi, pf.rho, p,
                                                   dev::PhiConvention::paper_positive);
            if (i == 0) first_norm = res.weighted_norm;
            if (i == n_scan - 1) last_norm = res.weighted_norm;
            if (res.weighted_norm < best_norm) {
                best_norm = res.weighted_norm;
                best_sigma = sigma;
            }
        }
        const double gap = std::abs(best_sigma - sigma_star) / sigma_star;
        c.expect(gap <= 0.25,
                 "||r||_rho minimizer sigma = " + fmt(best_sigma) + " vs sigma_star = " +
                     fmt(sigma_star) + " (gap " + fmt(gap) + ", norm falls " + fmt(first_norm) +
                     " -> " + fmt(last_norm) + " across the decade)");
    }
    return c.done();
}

// 7. Relativistic reduction: weak static Q congruence matches the
// nonrelativistic deviation module; flat/zero-Q deviation is affine; the
// u-constraints hold.
Outcome criterion_7() {
    Check c;
    const rel::MetricModel mink = rel::MetricModel::minkowski();
    const double q0 = 0.01, w = 1.0;
    const rel::QFieldModel qf = rel::QFieldModel::gaussian_bump(q0, w);

    rel::RelCongruenceState s0;
    s0.x = {};
    s0.u = {1.0, 0.0, 0.0, 0.0};
    s0.eta = {0.0, 0.01, 0.0, 0.0};
    s0.v = {};
    const double tau_end = 20.0;
    const auto run = rel::integrate_congruence(s0, mink, qf, 0.02, tau_end);

    const Particle p(1.0);
    const Grid g = make_grid(Geometry::line1d, -8.0, 8.0, 1601);
    RealField Q(g), phi_zero(g);
    for (std::size_t i = 0; i < g.n(); ++i)
        Q[i] = 0.5 * p.mass * q0 * std::exp(-g.x(i) * g.x(i) / (2.0 * w * w));
    const auto tf = dev::tidal_field(Q, phi_zero, p, dev::PhiConvention::paper_positive);
    const double d0 = interp_linear(tf.D, 0.0);
    const auto nr =
        dev::integrate_deviation(s0.eta[1], 0.0, [&](double) { return d0; }, 0.02, tau_end);

    double max_rel = 0.0;
    for (std::size_t i = 0; i < run.states.size(); ++i)
        max_rel = std::max(max_rel,
                           std::abs(run.states[i].eta[1] - nr.eta[i]) / std::abs(nr.eta[i]));
    c.expect(max_rel <= 0.01,
             "weak-Q congruence vs nonrelativistic deviation: max gap " + fmt(max_rel) +
                 " <= 1%");

    const rel::QFieldModel zero = rel::QFieldModel::zero();
    rel::RelCongruenceState f0 = s0;
    f0.v = {0.0, 0.003, 0.0, 0.0};
    const auto flat = rel::integrate_congruence(f0, mink, zero, 0.02, tau_end);
    double affine_err = 0.0;
    for (const auto& st : flat.states)
        affine_err = std::max(affine_err, std::abs(st.eta[1] - (0.01 + 0.003 * st.tau)));
    c.expect(affine_err <= 1e-10, "flat zero-Q deviation affine to " + fmt(affine_err));

    const double drift = std::max({run.max_uu_drift, run.max_ueta_drift, flat.max_uu_drift,
                                   flat.max_ueta_drift});
    c.expect(drift < 1e-6, "u.u and u.eta constraint drift " + fmt(drift) + " < 1e-6");
    return c.done();
}

// 8. Poisson-like equation: converged profile, mass-rescaling symmetry, and
// the two conventions' width exponents.
Outcome criterion_8() {
    Check c;
    collapse::CollapseParams params;
    params.grid_n = 1601;
    const auto prof = collapse::solve_collapse_profile(
        Particle(1.0), collapse::PoissonConvention::mass_consistent, 0.0, params);
    c.expect(prof.residual_norm < prof.residual_tol,
             "converged residual " + fmt(prof.residual_norm) + " < 1e-6 of source scale " +
                 fmt(prof.residual_tol / 1e-6 * 1.0));

    collapse::CollapseParams params2;
    params2.grid_n = 1401;
    const double m2 = std::cbrt(2.0);
    const auto prof2 = collapse::solve_collapse_profile(
        Particle(m2), collapse::PoissonConvention::mass_consistent, 0.0, params2);
    const double ratio = prof2.width * 2.0 / prof.width;
    c.expect(std::abs(ratio - 1.0) <= 1e-3,
             "mass-rescaling symmetry: lambda-scaled width ratio " + fmt(ratio) + " = 1 +/- 1e-3");

    auto slope_for = [](collapse::PoissonConvention conv) {
        std::vector<double> masses, widths;
        for (int i = 0; i <= 4; ++i) {
            const double m = std::pow(10.0, 0.125 * static_cast<double>(i));
            collapse::CollapseParams pr;
            pr.grid_n = 901 + 60 * static_cast<std::size_t>(i);
            masses.push_back(m);
            widths.push_back(
                collapse::solve_collapse_profile(Particle(m), conv, 0.0, pr).width);
        }
        return oracles::loglog_slope(masses, widths);
    };
    const double slope_mc = slope_for(collapse::PoissonConvention::mass_consistent);
    const double slope_pl = slope_for(collapse::PoissonConvention::paper_literal);
    c.expect(std::abs(slope_mc + 3.0) <= 0.05,
             "mass_consistent width exponent " + fmt(slope_mc) + " = -3 +/- 0.05");
    c.expect(std::abs(slope_pl + 2.0) <= 0.05,
             "paper_literal width exponent " + fmt(slope_pl) + " = -2 +/- 0.05");
    return c.done();
}

// 9. Gravitational localization: at sigma0 = sigma_star the SN width growth is
// under half the free growth over t = 2 m sigma0^2 / hbar.
Outcome criterion_9() {
    Check c;
    const Particle p(1.0);
    crit::CriticalityParams cp;
    cp.grid_n = 1601;
    const double sigma_star = crit::critical_width(p, cp).sigma_star;

    const Grid g = make_grid(Geometry::radial3d, 0.0, 16.0 * sigma_star, 801);
    evolve::EvolveConfig ec;
    ec.t_end = 2.0 * p.mass * sigma_star * sigma_star;
    ec.gravity_on = true;
    ec.record_every = 1000000;
    const auto rec =
        evolve::evolve(gaussian_state(g, sigma_star, p.mass), p, ec, gravity::GravityParams{});

    const double growth_g = rec.width.back() - rec.width.front();
    const double growth_free = (std::sqrt(2.0) - 1.0) * sigma_star;
    c.expect(growth_g < 0.5 * growth_free,
             "SN growth " + fmt(growth_g) + " < half the free growth " +
                 fmt(0.5 * growth_free) + " at sigma0 = sigma_star = " + fmt(sigma_star));
    return c.done();
}

struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> fn;
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria = {
        {1, "free-packet width law", criterion_1},
        {2, "Bohmian trajectory oracle", criterion_2},
        {3, "mean-Q / mean-Ug scaling exponents", criterion_3},
        {4, "critical width m^-3 law", criterion_4},
        {5, "critical body size", criterion_5},
        {6, "quantum-gravity balance condition", criterion_6},
        {7, "relativistic congruence reduction", criterion_7},
        {8, "Poisson-like collapse profile", criterion_8},
        {9, "gravitational localization at sigma_star", criterion_9},
    };

    int only = 0;
    if (argc > 1) only = std::atoi(argv[1]);

    int failures = 0;
    for (const auto& crit_case : criteria) {
        if (only != 0 && crit_case.id != only) continue;
        Outcome outcome;
        try {
            outcome = crit_case.fn();
        } catch (const std::exception& e) {
            outcome.pass = false;
            outcome.detail = std::string("    exception: ") + e.what() + "\n";
        }
        std::printf("[%s] criterion %d: %s\n%s", outcome.pass ? "PASS" : "FAIL", crit_case.id,
                    crit_case.name, outcome.detail.c_str());
        if (!outcome.pass) ++failures;
    }
    return failures;
}
