#pragma once

#include "snbohm/calculus.hpp"
#include "snbohm/units.hpp"

namespace snbohm::collapse {

// Source mass power in the Poisson-like equation for Q: paper_literal uses
// 4 pi G m rho, mass_consistent uses 4 pi G m^2 rho (the form that follows
// from divergence of the balance condition with mass density m rho, and whose
// width scaling reproduces sigma ~ hbar^2/(G m^3)).
enum class PoissonConvention { paper_literal, mass_consistent };

inline int mass_power(PoissonConvention c) {
    return c == PoissonConvention::paper_literal ? 1 : 2;
}

// Residual of the printed relation, r = lap(Q[rho]) - 4 pi G m^k rho with
// Q[rho] = -(hbar^2/2m) lap(sqrt(rho))/sqrt(rho).  Points where sqrt(rho) is
// below floor_fraction * max carry the nearest valid value.
RealField poisson_q_residual(const RealField& rho, const Particle& p, double G,
                             PoissonConvention convention, double hbar = 1.0,
                             double floor_fraction = 1e-8);

struct CollapseParams {
    double G = 1.0;
    double hbar = 1.0;
    std::size_t grid_n = 1601;
    double r_max_factor = 35.0;   // r_max = factor * hbar^2/(G m^(k+1))
    double damping = 0.5;
    std::size_t max_sweeps = 10000;
    double tol_fraction = 1e-6;   // residual tolerance relative to 4 pi G m^k max(rho)
};

struct CollapseProfile {
    Grid grid;
    RealField rho;       // normalized
    RealField Q;         // from rho
    RealField residual;  // lap(Q) + 4 pi G m^k rho of the solved equation
    double residual_norm = 0.0;
    double residual_tol = 0.0;
    double energy = 0.0;  // stationary eigenvalue E
    double width = 0.0;   // per-axis rms width of rho
    std::size_t sweeps = 0;
    PoissonConvention convention = PoissonConvention::mass_consistent;
    std::string convention_note;
    std::vector<double> trace_energy;
    std::vector<double> trace_residual;
};

// Damped self-consistent relaxation for the localized profile of the
// Poisson-like equation.  Solved in the orientation lap(Q) = -4 pi G m^k rho,
// the one consistent with the balance condition and attractive self-gravity
// (the +4 pi G m^k rho orientation admits no localized solution); the
// convention note records this.  Aborts on divergence or when no bound
// profile exists (e.g. G -> 0).
CollapseProfile solve_collapse_profile(const Particle& p, PoissonConvention convention,
                                       double initial_sigma_guess,
                                       const CollapseParams& params);

}  // namespace snbohm::collapse
