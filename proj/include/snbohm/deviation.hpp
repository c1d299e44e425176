#pragma once

#include <functional>

#include "snbohm/gravity.hpp"

namespace snbohm::dev {

using gravity::PhiConvention;

// Tidal field D(x) = d/dx [ -(1/m) dQ/dx - d phi_newton/dx ]: the spatial
// derivative of the net specific force (quantum + self-gravity).  Neighboring
// trajectories obey eta_dd = D(x(t)) eta.  The sign is anchored to two facts:
// the free Gaussian must give D > 0 (deviation grows like sigma(t)), and
// balanced inputs phi_paper = Q/m must give D = 0.
struct TidalField {
    RealField D;
    std::string convention;
};

TidalField tidal_field(const RealField& Q, const RealField& phi, const Particle& p,
                       PhiConvention phi_convention);

struct DeviationSeries {
    std::vector<double> times;
    std::vector<double> eta;
    std::vector<double> eta_dot;
};

// RK4 integration of eta_dd = D(t) eta with D supplied along the fiducial
// trajectory.
DeviationSeries integrate_deviation(double eta0, double eta_dot0,
                                    const std::function<double(double)>& tidal_along_path,
                                    double dt, double t_end);

// Pointwise balance residual r = dQ/dx - m dphi_paper/dx together with the
// rho-weighted norm ||r||_rho = sqrt(int rho r^2 dmu).
struct BalanceResidual {
    RealField r;
    double weighted_norm = 0.0;
};

BalanceResidual balance_residual(const RealField& Q, const RealField& phi, const RealField& rho,
                                 const Particle& p, PhiConvention phi_convention);

}  // namespace snbohm::dev
