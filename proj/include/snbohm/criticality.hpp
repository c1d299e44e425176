#pragma once

#include "snbohm/gravity.hpp"
#include "snbohm/quantum.hpp"

namespace snbohm::crit {

struct CriticalityParams {
    double G = 1.0;
    double hbar = 1.0;
    Geometry geometry = Geometry::radial3d;
    std::size_t grid_n = 2001;
    double domain_factor = 12.0;  // grid extent = domain_factor * max sigma probed
    double line_softening_factor = 1.0;  // epsilon = factor * h on line1d (qualitative only)
};

struct EnergyProfile {
    std::vector<double> sigma;
    std::vector<double> mean_q;
    std::vector<double> mean_ug;
    std::vector<double> energy;  // <Q> + <U_g>
    double slope_q = 0.0;        // log-log fit of <Q> vs sigma
    double slope_ug = 0.0;       // log-log fit of |<U_g>| vs sigma
};

struct CriticalityReport {
    EnergyProfile profile;
    double sigma_star = 0.0;
    double coefficient_c = 0.0;  // sigma_star * G m^3 / hbar^2
    bool bracketed = true;       // false when E(sigma) is monotone on the scan
};

// E(sigma) = <Q> + <U_g> over a Gaussian family; sigma_range must span at
// least a decade with >= 20 samples.
EnergyProfile energy_profile(const Particle& p, double sigma_lo, double sigma_hi,
                             std::size_t n_samples, const CriticalityParams& params);

// Stationary point of E(sigma) by golden-section search to relative interval
// tolerance 1e-6.  Throws NumericalError when no bracket exists (monotone
// regime, e.g. G = 0).
CriticalityReport critical_width(const Particle& p, const CriticalityParams& params,
                                 double sigma_lo = 0.0, double sigma_hi = 0.0);

// hbar^2 / (G m^3) in the given constants.
double diosi_width(double m, double hbar = 1.0, double G = 1.0);

// sigma^(R) = sigma_min^(1/4) R^(3/4).
double body_packet_width(double sigma_min, double R);

// Solves sigma^(R)(R) = R with m(R) = (4 pi / 3) density R^3:
// R_c = [hbar^2 / (G ((4 pi/3) density)^3)]^(1/10).  SI inputs and output.
double critical_size(double mass_density_si);

// Least-squares slope of log(y) vs log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

// Single E(sigma) evaluation (exposed for cross-module consistency tests).
struct EnergyPoint {
    double mean_q = 0.0;
    double mean_ug = 0.0;
    double energy = 0.0;
};
EnergyPoint energy_at(const Particle& p, double sigma, const CriticalityParams& params,
                      double domain_sigma = 0.0);

}  // namespace snbohm::crit
