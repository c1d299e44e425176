#include "snbohm/quantum.hpp"

#include <cmath>
#include <numbers>

namespace snbohm::quantum {

QuantumPotentialResult quantum_potential(const PolarFields& pf, const Particle& p, double hbar) {
    const Grid& g = pf.R.grid();
    const std::size_t n = g.n();

    std::size_t n_valid = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (pf.valid[i]) ++n_valid;
    if (2 * n_valid < n)
        throw ContractError("quantum_potential: valid region below 50% of the grid");

    const RealField lapR = laplacian(pf.R);
    QuantumPotentialResult res;
    res.Q = RealField(g);
    res.extrapolated.assign(n, 0);

    const double coef = -hbar * hbar / (2.0 * p.mass);
    for (std::size_t i = 0; i < n; ++i)
        if (pf.valid[i]) res.Q[i] = coef * lapR[i] / pf.R[i];

    // Carry the nearest valid value into the floored region (flagged).
    std::ptrdiff_t last = -1;
    for (std::size_t i = 0; i < n; ++i) {
        if (pf.valid[i]) {
            last = static_cast<std::ptrdiff_t>(i);
        } else {
            std::size_t j_right = i;
            while (j_right < n && !pf.valid[j_right]) ++j_right;
            double v;
            if (last >= 0 && j_right < n) {
                const auto dl = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(i) - last);
                const std::size_t dr = j_right - i;
                v = (dl <= dr) ? res.Q[static_cast<std::size_t>(last)] : res.Q[j_right];
            } else if (last >= 0) {
                v = res.Q[static_cast<std::size_t>(last)];
            } else {
                v = res.Q[j_right];
            }
            res.Q[i] = v;
            res.extrapolated[i] = 1;
            ++res.n_extrapolated;
        }
    }
    return res;
}

RealField quantum_force(const RealField& Q) {
    RealField f = gradient(Q);
    for (auto& v : f.values()) v = -v;
    return f;
}

GaussianBuild gaussian_amplitude(const GaussianPacketSpec& spec, const Grid& grid) {
    GaussianBuild out;
    const std::size_t n = grid.n();
    const double s2 = spec.sigma0 * spec.sigma0;

    const double span = (grid.geometry() == Geometry::line1d)
                            ? std::min(-grid.x_min(), grid.x_max())
                            : grid.x_max();
    out.domain_warning = span < 10.0 * spec.sigma0;

    const double norm_const =
        (grid.geometry() == Geometry::line1d)
            ? std::pow(2.0 * std::numbers::pi * s2, -0.25)
            : std::pow(2.0 * std::numbers::pi * s2, -0.75);

    // direct construction: R > 0 everywhere and S = 0, so no phase recovery
    // is needed (and wide grids must not trip the 50% validity rule)
    RealField R(grid);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = grid.x(i);
        R[i] = norm_const * std::exp(-x * x / (4.0 * s2));
    }
    RealField R2(grid);
    for (std::size_t i = 0; i < n; ++i) R2[i] = R[i] * R[i];
    const double total = integrate(R2);
    const double scale = 1.0 / std::sqrt(total);

    out.pf.R = RealField(grid);
    out.pf.S = RealField(grid);
    out.pf.rho = RealField(grid);
    out.pf.valid.assign(n, 0);
    double r_max = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        out.pf.R[i] = scale * R[i];
        out.pf.rho[i] = out.pf.R[i] * out.pf.R[i];
        r_max = std::max(r_max, out.pf.R[i]);
    }
    out.pf.amplitude_floor = default_floor_fraction * r_max;
    for (std::size_t i = 0; i < n; ++i)
        out.pf.valid[i] = out.pf.R[i] > out.pf.amplitude_floor ? 1 : 0;
    return out;
}

double mean_quantum_potential(const PolarFields& pf, const Particle& p, double hbar) {
    const auto qp = quantum_potential(pf, p, hbar);
    return inner(pf.rho, qp.Q);
}

namespace closed {

double free_amplitude(double x, double t, double sigma0, double m, Geometry geom, double hbar) {
    const double st = free_width(t, sigma0, m, hbar);
    const double s2 = st * st;
    const double pref = (geom == Geometry::line1d)
                            ? std::pow(2.0 * std::numbers::pi * s2, -0.25)
                            : std::pow(2.0 * std::numbers::pi * s2, -0.75);
    return pref * std::exp(-x * x / (4.0 * s2));
}

double free_action(double x, double t, double sigma0, double m, Geometry geom, double hbar) {
    const double om = hbar / (2.0 * m * sigma0 * sigma0);
    const double denom = 1.0 + om * om * t * t;
    const double dims = (geom == Geometry::line1d) ? 1.0 : 3.0;
    return hbar * (x * x * om * t / (4.0 * sigma0 * sigma0 * denom) -
                   0.5 * dims * std::atan(om * t));
}

}  // namespace closed

PolarFields free_gaussian_fields(const GaussianPacketSpec& spec, const Grid& grid, double t,
                                 double hbar) {
    const std::size_t n = grid.n();
    PolarFields pf;
    pf.R = RealField(grid);
    pf.S = RealField(grid);
    pf.rho = RealField(grid);
    pf.valid.assign(n, 0);

    double r_max = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = grid.x(i);
        pf.R[i] = closed::free_amplitude(x, t, spec.sigma0, spec.mass, grid.geometry(), hbar);
        pf.S[i] = closed::free_action(x, t, spec.sigma0, spec.mass, grid.geometry(), hbar);
        pf.rho[i] = pf.R[i] * pf.R[i];
        r_max = std::max(r_max, pf.R[i]);
    }
    pf.amplitude_floor = default_floor_fraction * r_max;
    for (std::size_t i = 0; i < n; ++i) pf.valid[i] = pf.R[i] > pf.amplitude_floor ? 1 : 0;
    return pf;
}

}  // namespace snbohm::quantum
