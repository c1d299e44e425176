#pragma once

#include "snbohm/calculus.hpp"
#include "snbohm/polar.hpp"
#include "snbohm/units.hpp"

namespace snbohm::quantum {

// Gaussian packet with zero initial group velocity, centered at the origin.
struct GaussianPacketSpec {
    double sigma0 = 1.0;
    double mass = 1.0;

    GaussianPacketSpec(double sigma0_, double mass_) : sigma0(sigma0_), mass(mass_) {
        if (!(sigma0 > 0.0)) throw ContractError("GaussianPacketSpec: sigma0 must be positive");
        if (!(mass > 0.0)) throw ContractError("GaussianPacketSpec: mass must be positive");
    }
};

struct QuantumPotentialResult {
    RealField Q;
    std::vector<unsigned char> extrapolated;  // 1 where Q was carried from a valid neighbor
    std::size_t n_extrapolated = 0;
};

// Q = -(hbar^2 / 2m) lap(R)/R.  Below the amplitude floor Q is extrapolated
// from the nearest valid point and flagged; rejects if the valid region is
// less than half the grid.
QuantumPotentialResult quantum_potential(const PolarFields& pf, const Particle& p,
                                         double hbar = 1.0);

// f = -grad(Q).
RealField quantum_force(const RealField& Q);

// Stationary Gaussian amplitude R = N exp(-x^2 / 4 sigma0^2), S = 0, with the
// geometry-correct normalization (renormalized on the grid).  Warns via return
// flag when the domain is narrower than 10 sigma0.
struct GaussianBuild {
    PolarFields pf;
    bool domain_warning = false;
};
GaussianBuild gaussian_amplitude(const GaussianPacketSpec& spec, const Grid& grid);

// <Q> = integral R^2 Q dmu (trapezoid).
double mean_quantum_potential(const PolarFields& pf, const Particle& p, double hbar = 1.0);

// Closed forms for the Gaussian packet (width sigma is the instantaneous rms
// width, per-axis in 3D).
namespace closed {

inline double q_1d(double x, double sigma, double m, double hbar = 1.0) {
    const double s2 = sigma * sigma;
    return hbar * hbar / (4.0 * m * s2) * (1.0 - x * x / (2.0 * s2));
}

inline double q_3d(double r, double sigma, double m, double hbar = 1.0) {
    const double s2 = sigma * sigma;
    return hbar * hbar / (4.0 * m * s2) * (3.0 - r * r / (2.0 * s2));
}

// f = -dQ/dx = hbar^2 x / (4 m sigma^4), same form per axis in 3D.
inline double force_1d(double x, double sigma, double m, double hbar = 1.0) {
    const double s2 = sigma * sigma;
    return hbar * hbar * x / (4.0 * m * s2 * s2);
}

// Free-packet width sigma(t) = sigma0 sqrt(1 + (hbar t / 2 m sigma0^2)^2).
inline double free_width(double t, double sigma0, double m, double hbar = 1.0) {
    const double w = hbar * t / (2.0 * m * sigma0 * sigma0);
    return sigma0 * std::sqrt(1.0 + w * w);
}

// Bohmian velocity field of the freely spreading packet.
inline double free_velocity(double x, double t, double sigma0, double m, double hbar = 1.0) {
    const double om = hbar / (2.0 * m * sigma0 * sigma0);
    return x * om * om * t / (1.0 + om * om * t * t);
}

double free_amplitude(double x, double t, double sigma0, double m, Geometry geom,
                      double hbar = 1.0);
double free_action(double x, double t, double sigma0, double m, Geometry geom,
                   double hbar = 1.0);

}  // namespace closed

// Freely evolving Gaussian sampled on a grid at time t (exact R and S).
PolarFields free_gaussian_fields(const GaussianPacketSpec& spec, const Grid& grid, double t,
                                 double hbar = 1.0);

}  // namespace snbohm::quantum
