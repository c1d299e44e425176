#include "snbohm/deviation.hpp"

#include <cmath>

namespace snbohm::dev {

TidalField tidal_field(const RealField& Q, const RealField& phi, const Particle& p,
                       PhiConvention phi_convention) {
    if (!(Q.grid() == phi.grid())) throw ContractError("tidal_field: Q and phi grids differ");

    const RealField grad_q = gradient(Q);
    const RealField grad_phi = gradient(phi);
    const double to_newton = (phi_convention == PhiConvention::paper_positive) ? -1.0 : 1.0;

    // net specific force a = -(1/m) Q' - phi_newton'
    RealField accel(Q.grid());
    for (std::size_t i = 0; i < accel.size(); ++i)
        accel[i] = -grad_q[i] / p.mass - to_newton * grad_phi[i];

    TidalField out;
    out.D = gradient(accel);
    out.convention =
        "D = d/dx[-(1/m) dQ/dx - dphi_newton/dx]; eta_dd = D eta; free Gaussian D > 0";
    return out;
}

DeviationSeries integrate_deviation(double eta0, double eta_dot0,
                                    const std::function<double(double)>& tidal_along_path,
                                    double dt, double t_end) {
    if (!(dt > 0.0) || !(t_end >= 0.0))
        throw ContractError("integrate_deviation: need dt > 0 and t_end >= 0");
    const auto n_steps = static_cast<std::size_t>(std::llround(t_end / dt));

    DeviationSeries out;
    out.times.reserve(n_steps + 1);
    out.eta.reserve(n_steps + 1);
    out.eta_dot.reserve(n_steps + 1);

    double eta = eta0, etad = eta_dot0;
    out.times.push_back(0.0);
    out.eta.push_back(eta);
    out.eta_dot.push_back(etad);

    for (std::size_t s = 0; s < n_steps; ++s) {
        const double t = dt * static_cast<double>(s);
        const double d0 = tidal_along_path(t);
        const double dh = tidal_along_path(t + 0.5 * dt);
        const double d1 = tidal_along_path(t + dt);

        const double k1e = etad, k1d = d0 * eta;
        const double k2e = etad + 0.5 * dt * k1d, k2d = dh * (eta + 0.5 * dt * k1e);
        const double k3e = etad + 0.5 * dt * k2d, k3d = dh * (eta + 0.5 * dt * k2e);
        const double k4e = etad + dt * k3d, k4d = d1 * (eta + dt * k3e);

        eta += dt / 6.0 * (k1e + 2.0 * k2e + 2.0 * k3e + k4e);
        etad += dt / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);

        out.times.push_back(t + dt);
        out.eta.push_back(eta);
        out.eta_dot.push_back(etad);
    }
    return out;
}

BalanceResidual balance_residual(const RealField& Q, const RealField& phi, const RealField& rho,
                                 const Particle& p, PhiConvention phi_convention) {
    if (!(Q.grid() == phi.grid()) || !(Q.grid() == rho.grid()))
        throw ContractError("balance_residual: fields on different grids");

    const RealField grad_q = gradient(Q);
    const RealField grad_phi = gradient(phi);
    const double to_paper = (phi_convention == PhiConvention::paper_positive) ? 1.0 : -1.0;

    BalanceResidual out;
    out.r = RealField(Q.grid());
    for (std::size_t i = 0; i < out.r.size(); ++i)
        out.r[i] = grad_q[i] - p.mass * to_paper * grad_phi[i];

    RealField r2(Q.grid());
    for (std::size_t i = 0; i < r2.size(); ++i) r2[i] = out.r[i] * out.r[i];
    out.weighted_norm = std::sqrt(inner(rho, r2));
    return out;
}

}  // namespace snbohm::dev
