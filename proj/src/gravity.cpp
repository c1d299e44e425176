#include "snbohm/gravity.hpp"

#include <cmath>
#include <numbers>

namespace snbohm::gravity {

namespace {

void validate(const RealField& rho, const GravityParams& params) {
    if (params.epsilon < 0.0) throw ContractError("GravityParams: epsilon must be >= 0");
    if (rho.grid().geometry() == Geometry::line1d && params.epsilon == 0.0)
        throw ContractError("self_energy_field: 1D kernel needs softening (epsilon > 0)");
    if (rho.grid().geometry() == Geometry::radial3d && params.epsilon != 0.0)
        throw ContractError("self_energy_field: radial3d is exact, no softening allowed");
}

// -m^2 G * kernel integral, per target point.
RealField kernel_integral(const RealField& rho, const Particle& p, const GravityParams& params) {
    const Grid& g = rho.grid();
    const std::size_t n = g.n();
    RealField u(g);
    const double pref = -params.G * p.mass * p.mass;

    if (g.geometry() == Geometry::line1d) {
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                const double d = std::abs(g.x(i) - g.x(j));
                s += g.quad_weight(j) * rho[j] / (d + params.epsilon);
            }
            u[i] = pref * s;
        }
        return u;
    }

    // Shell theorem: U(r) = pref * [ M(r)/r + int_r^rmax 4 pi s rho ds ], with
    // M(r) the enclosed probability mass.  Panels integrate s^k rho with rho
    // linear on the panel, exactly in s; plain cumulative trapezoids of
    // s^2 rho are O(1) wrong in M(r)/r at the first cell off the axis.
    std::vector<double> enclosed(n, 0.0), outer_acc(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) {
        const double a = g.x(i - 1), b = g.x(i);
        const double slope = (rho[i] - rho[i - 1]) / (b - a);
        const double c0 = rho[i - 1] - slope * a;  // rho(s) = c0 + slope * s on the panel
        auto moment = [&](int k) {
            const double p1 = (std::pow(b, k + 1) - std::pow(a, k + 1)) / (k + 1);
            const double p2 = (std::pow(b, k + 2) - std::pow(a, k + 2)) / (k + 2);
            return c0 * p1 + slope * p2;
        };
        enclosed[i] = enclosed[i - 1] + 4.0 * std::numbers::pi * moment(2);
        outer_acc[i] = outer_acc[i - 1] + 4.0 * std::numbers::pi * moment(1);
    }
    const double outer_total = outer_acc.back();

    for (std::size_t i = 0; i < n; ++i) {
        const double r = g.x(i);
        const double interior = (i == 0) ? 0.0 : enclosed[i] / r;
        const double exterior = outer_total - outer_acc[i];
        u[i] = pref * (interior + exterior);
    }
    return u;
}

}  // namespace

RealField self_energy_field(const RealField& rho, const Particle& p, const GravityParams& params) {
    validate(rho, params);
    return kernel_integral(rho, p, params);
}

RealField potential_field(const RealField& rho, const Particle& p, const GravityParams& params) {
    // U_g = -m phi_paper = +m phi_newton, enforced by construction.
    RealField u = self_energy_field(rho, p, params);
    RealField phi(rho.grid());
    const double s = (params.sign_convention == PhiConvention::paper_positive) ? -1.0 : 1.0;
    for (std::size_t i = 0; i < u.size(); ++i) phi[i] = s * u[i] / p.mass;
    return phi;
}

double mean_self_energy(const RealField& rho, const Particle& p, const GravityParams& params) {
    return inner(rho, self_energy_field(rho, p, params));
}

}  // namespace snbohm::gravity
