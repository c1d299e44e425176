#include "snbohm/criticality.hpp"

#include <cmath>
#include <numbers>

namespace snbohm::crit {

namespace {

Grid grid_for(double sigma_max, const CriticalityParams& params) {
    if (params.domain_factor < 10.0)
        throw ContractError("CriticalityParams: domain_factor must be >= 10");
    const double extent = params.domain_factor * sigma_max;
    if (params.geometry == Geometry::radial3d)
        return make_grid(Geometry::radial3d, 0.0, extent, params.grid_n);
    return make_grid(Geometry::line1d, -extent, extent, params.grid_n);
}

gravity::GravityParams gravity_for(const Grid& g, const CriticalityParams& params) {
    gravity::GravityParams gp;
    gp.G = params.G;
    gp.epsilon = (g.geometry() == Geometry::line1d)
                     ? params.line_softening_factor * g.spacing()
                     : 0.0;
    return gp;
}

}  // namespace

EnergyPoint energy_at(const Particle& p, double sigma, const CriticalityParams& params,
                      double domain_sigma) {
    const Grid g = grid_for(domain_sigma > 0.0 ? domain_sigma : sigma, params);
    const auto build = quantum::gaussian_amplitude(quantum::GaussianPacketSpec(sigma, p.mass), g);
    EnergyPoint pt;
    pt.mean_q = quantum::mean_quantum_potential(build.pf, p, params.hbar);
    pt.mean_ug = gravity::mean_self_energy(build.pf.rho, p, gravity_for(g, params));
    pt.energy = pt.mean_q + pt.mean_ug;
    return pt;
}

EnergyProfile energy_profile(const Particle& p, double sigma_lo, double sigma_hi,
                             std::size_t n_samples, const CriticalityParams& params) {
    if (!(sigma_lo > 0.0) || !(sigma_hi > sigma_lo))
        throw ContractError("energy_profile: need 0 < sigma_lo < sigma_hi");
    if (sigma_hi / sigma_lo < 10.0)
        throw ContractError("energy_profile: sigma range must span at least a decade");
    if (n_samples < 20) throw ContractError("energy_profile: need at least 20 samples");

    EnergyProfile prof;
    prof.sigma.resize(n_samples);
    prof.mean_q.resize(n_samples);
    prof.mean_ug.resize(n_samples);
    prof.energy.resize(n_samples);

    const double log_lo = std::log(sigma_lo), log_hi = std::log(sigma_hi);
    for (std::size_t i = 0; i < n_samples; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(n_samples - 1);
        const double sigma = std::exp(log_lo + t * (log_hi - log_lo));
        // per-sigma grids: the domain must cover >= 10 sigma while keeping the
        // packet above the amplitude floor on most of the grid
        const EnergyPoint pt = energy_at(p, sigma, params);
        prof.sigma[i] = sigma;
        prof.mean_q[i] = pt.mean_q;
        prof.mean_ug[i] = pt.mean_ug;
        prof.energy[i] = pt.energy;
    }

    std::vector<double> abs_ug(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i) abs_ug[i] = std::abs(prof.mean_ug[i]);
    prof.slope_q = loglog_slope(prof.sigma, prof.mean_q);
    prof.slope_ug = loglog_slope(prof.sigma, abs_ug);
    return prof;
}

CriticalityReport critical_width(const Particle& p, const CriticalityParams& params,
                                 double sigma_lo, double sigma_hi) {
    CriticalityReport rep;
    const double sigma_d = diosi_width(p.mass, params.hbar, params.G);
    if (sigma_lo <= 0.0) sigma_lo = 0.25 * sigma_d;
    if (sigma_hi <= 0.0) sigma_hi = 4.0 * sigma_d;

    // Per-sigma grids keep the relative resolution h/sigma constant, so the
    // discretization bias is a smooth power-law overlay on E(sigma).
    auto energy = [&](double s) { return energy_at(p, s, params).energy; };

    // Verify the bracket actually contains a minimum.
    const double e_lo = energy(sigma_lo), e_hi = energy(sigma_hi);
    const double s_mid = std::sqrt(sigma_lo * sigma_hi);
    const double e_mid = energy(s_mid);
    if (!(e_mid < e_lo && e_mid < e_hi)) {
        rep.bracketed = false;
        throw NumericalError("critical_width: no bracketing minimum on the scanned range "
                             "(monotone regime)");
    }

    // Golden-section search.
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = sigma_lo, b = sigma_hi;
    double c = b - gr * (b - a);
    double d = a + gr * (b - a);
    double fc = energy(c), fd = energy(d);
    while ((b - a) > 1e-6 * (a + b) * 0.5) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = energy(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = energy(d);
        }
    }
    rep.sigma_star = 0.5 * (a + b);
    rep.coefficient_c = rep.sigma_star * params.G * std::pow(p.mass, 3) /
                        (params.hbar * params.hbar);
    rep.profile = energy_profile(p, sigma_lo, sigma_hi, 25, params);
    return rep;
}

double diosi_width(double m, double hbar, double G) {
    if (!(m > 0.0)) throw ContractError("diosi_width: mass must be positive");
    return hbar * hbar / (G * m * m * m);
}

double body_packet_width(double sigma_min, double R) {
    if (!(sigma_min > 0.0) || !(R > 0.0))
        throw ContractError("body_packet_width: arguments must be positive");
    return std::pow(sigma_min, 0.25) * std::pow(R, 0.75);
}

double critical_size(double mass_density_si) {
    if (!(mass_density_si > 0.0)) throw ContractError("critical_size: density must be positive");
    const double bulk = (4.0 / 3.0) * std::numbers::pi * mass_density_si;
    const double hbar = constants::hbar_si;
    return std::pow(hbar * hbar / (constants::G_si * bulk * bulk * bulk), 0.1);
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw ContractError("loglog_slope: need matching vectors with >= 2 points");
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const auto n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]);
        const double ly = std::log(std::abs(y[i]));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace snbohm::crit
