#include "snbohm/collapse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace snbohm::collapse {

namespace {

constexpr double four_pi = 4.0 * std::numbers::pi;

// Q[rho] with nearest-valid carry below the amplitude floor.
RealField q_of_rho(const RealField& rho, const Particle& p, double hbar, double floor_fraction,
                   std::vector<unsigned char>* valid_out = nullptr) {
    const Grid& g = rho.grid();
    const std::size_t n = g.n();
    RealField w(g);
    double w_max = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (rho[i] < 0.0) throw ContractError("poisson_q_residual: rho must be non-negative");
        w[i] = std::sqrt(rho[i]);
        w_max = std::max(w_max, w[i]);
    }
    const double floor = floor_fraction * w_max;
    const RealField lap_w = laplacian(w);
    const double coef = -hbar * hbar / (2.0 * p.mass);

    RealField q(g);
    std::vector<unsigned char> valid(n, 0);
    for (std::size_t i = 0; i < n; ++i)
        if (w[i] > floor) {
            q[i] = coef * lap_w[i] / w[i];
            valid[i] = 1;
        }
    // carry nearest valid value outward
    std::ptrdiff_t last = -1;
    for (std::size_t i = 0; i < n; ++i) {
        if (valid[i]) {
            last = static_cast<std::ptrdiff_t>(i);
        } else {
            std::size_t j = i;
            while (j < n && !valid[j]) ++j;
            if (last >= 0 && j < n)
                q[i] = (i - static_cast<std::size_t>(last) <= j - i)
                           ? q[static_cast<std::size_t>(last)]
                           : q[j];
            else if (last >= 0)
                q[i] = q[static_cast<std::size_t>(last)];
            else if (j < n)
                q[i] = q[j];
        }
    }
    if (valid_out) *valid_out = std::move(valid);
    return q;
}

// General tridiagonal Thomas solve; lower/upper are the off-diagonal bands.
void solve_tri(std::vector<double> diag, const std::vector<double>& lower,
               const std::vector<double>& upper, std::vector<double>& rhs) {
    const std::size_t n = diag.size();
    for (std::size_t i = 1; i < n; ++i) {
        const double w = lower[i] / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    rhs[n - 1] /= diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
}

// Rows of the radial Laplacian matching the fields_core stencil exactly;
// unknowns 0..n-2, Dirichlet value at n-1.
struct RadialStencil {
    std::vector<double> diag, lower, upper;  // size n-1; lower[0], upper[n-2] unused

    RadialStencil(const Grid& g) {
        const std::size_t m = g.n() - 1;
        const double h = g.spacing();
        diag.assign(m, 0.0);
        lower.assign(m, 0.0);
        upper.assign(m, 0.0);
        diag[0] = -6.0 / (h * h);
        upper[0] = 6.0 / (h * h);
        for (std::size_t i = 1; i < m; ++i) {
            const double r = g.x(i);
            diag[i] = -2.0 / (h * h);
            lower[i] = 1.0 / (h * h) - 1.0 / (r * h);
            upper[i] = 1.0 / (h * h) + 1.0 / (r * h);
        }
    }
};

}  // namespace

RealField poisson_q_residual(const RealField& rho, const Particle& p, double G,
                             PoissonConvention convention, double hbar, double floor_fraction) {
    const RealField q = q_of_rho(rho, p, hbar, floor_fraction);
    const RealField lap_q = laplacian(q);
    const double mk = std::pow(p.mass, mass_power(convention));
    RealField res(rho.grid());
    for (std::size_t i = 0; i < rho.size(); ++i)
        res[i] = lap_q[i] - four_pi * G * mk * rho[i];
    return res;
}

CollapseProfile solve_collapse_profile(const Particle& p, PoissonConvention convention,
                                       double initial_sigma_guess, const CollapseParams& params) {
    const int k = mass_power(convention);
    const double mk = std::pow(p.mass, k);
    const double length_scale =
        params.hbar * params.hbar / (params.G * std::pow(p.mass, k + 1));
    if (!std::isfinite(length_scale) || !(length_scale > 0.0))
        throw NumericalError("solve_collapse_profile: no localized solution (G <= 0)");

    const Grid g = make_grid(Geometry::radial3d, 0.0, params.r_max_factor * length_scale,
                             params.grid_n);
    const std::size_t n = g.n();
    const double kappa = params.hbar * params.hbar / (2.0 * p.mass);
    const double e_scale = kappa / (length_scale * length_scale);

    const double sigma0 = (initial_sigma_guess > 0.0) ? initial_sigma_guess : 2.0 * length_scale;
    RealField w(g);
    for (std::size_t i = 0; i < n; ++i) {
        const double r = g.x(i);
        w[i] = std::exp(-r * r / (4.0 * sigma0 * sigma0));
    }

    auto normalize = [&](RealField& f) {
        RealField f2(g);
        for (std::size_t i = 0; i < n; ++i) f2[i] = f[i] * f[i];
        const double nrm = std::sqrt(integrate(f2));
        for (std::size_t i = 0; i < n; ++i) f[i] /= nrm;
    };
    normalize(w);

    const RadialStencil L(g);
    const std::size_t m = n - 1;

    // Discrete Poisson for phi_newton: L phi = 4 pi G m rho, phi(r_max) = -G m / r_max.
    auto solve_phi = [&](const RealField& rho) {
        std::vector<double> rhs(m);
        for (std::size_t i = 0; i < m; ++i) rhs[i] = four_pi * params.G * p.mass * rho[i];
        const double phi_bc = -params.G * p.mass / g.x_max();
        rhs[m - 1] -= L.upper[m - 1] * phi_bc;
        solve_tri(L.diag, L.lower, L.upper, rhs);
        RealField phi(g);
        for (std::size_t i = 0; i < m; ++i) phi[i] = rhs[i];
        phi[n - 1] = phi_bc;
        return phi;
    };

    // H = -kappa L + V with V = m^(k-1) phi_newton.
    auto rayleigh = [&](const RealField& f, const RealField& v) {
        double num = 0.0, den = 0.0;
        for (std::size_t i = 1; i < m; ++i) {
            const double hw = -kappa * (L.lower[i] * f[i - 1] + L.diag[i] * f[i] +
                                        L.upper[i] * ((i + 1 < m) ? f[i + 1] : 0.0)) +
                              v[i] * f[i];
            const double wt = g.x(i) * g.x(i);
            num += wt * f[i] * hw;
            den += wt * f[i] * f[i];
        }
        return num / den;
    };

    auto inverse_iterate = [&](RealField& f, const RealField& v, double shift) {
        std::vector<double> diag(m), lower(m), upper(m), rhs(m);
        for (std::size_t i = 0; i < m; ++i) {
            diag[i] = -kappa * L.diag[i] + v[i] - shift;
            lower[i] = -kappa * L.lower[i];
            upper[i] = -kappa * L.upper[i];
            rhs[i] = f[i];
        }
        solve_tri(diag, lower, upper, rhs);
        double peak = 0.0;
        std::size_t peak_i = 0;
        for (std::size_t i = 0; i < m; ++i)
            if (std::abs(rhs[i]) > peak) {
                peak = std::abs(rhs[i]);
                peak_i = i;
            }
        const double sign = rhs[peak_i] >= 0.0 ? 1.0 : -1.0;
        for (std::size_t i = 0; i < m; ++i) f[i] = sign * rhs[i];
        f[n - 1] = 0.0;
        normalize(f);
    };

    CollapseProfile prof;
    prof.grid = g;
    prof.convention = convention;

    double resid_norm = 0.0, resid_tol = 0.0, energy = 0.0;
    std::size_t rising = 0;
    double prev_resid = std::numeric_limits<double>::infinity();
    bool converged = false;
    std::size_t sweep = 0;

    RealField rho(g), q_field(g), resid_field(g);
    std::vector<unsigned char> q_valid;

    for (sweep = 1; sweep <= params.max_sweeps; ++sweep) {
        for (std::size_t i = 0; i < n; ++i) rho[i] = w[i] * w[i];
        const RealField phi = solve_phi(rho);
        RealField v(g);
        const double vk = std::pow(p.mass, k - 1);
        for (std::size_t i = 0; i < n; ++i) v[i] = vk * phi[i];

        energy = rayleigh(w, v);
        const double shift = energy - std::max(0.5 * std::abs(energy), 0.5 * e_scale);

        RealField w_new = w;
        inverse_iterate(w_new, v, shift);
        inverse_iterate(w_new, v, shift);
        energy = rayleigh(w_new, v);

        for (std::size_t i = 0; i < n; ++i)
            w[i] = (1.0 - params.damping) * w[i] + params.damping * w_new[i];
        w[n - 1] = 0.0;
        normalize(w);

        // Residual of the solved equation lap(Q) + 4 pi G m^k rho = 0.
        for (std::size_t i = 0; i < n; ++i) rho[i] = w[i] * w[i];
        q_field = q_of_rho(rho, p, params.hbar, 1e-7, &q_valid);
        const RealField lap_q = laplacian(q_field);
        double max_rho = 0.0;
        for (std::size_t i = 0; i < n; ++i) max_rho = std::max(max_rho, rho[i]);
        resid_tol = params.tol_fraction * four_pi * params.G * mk * max_rho;

        resid_norm = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            // every point the laplacian stencil of row i touches must be valid
            const bool stencil_valid =
                (i == 0) ? (q_valid[0] && q_valid[1])
                         : (i + 1 < n && q_valid[i - 1] && q_valid[i] && q_valid[i + 1]);
            resid_field[i] = stencil_valid ? lap_q[i] + four_pi * params.G * mk * rho[i] : 0.0;
            resid_norm = std::max(resid_norm, std::abs(resid_field[i]));
        }

        prof.trace_energy.push_back(energy);
        prof.trace_residual.push_back(resid_norm);

        if (resid_norm < resid_tol) {
            converged = true;
            break;
        }
        if (sweep > 30 && energy > -1e-10 * e_scale)
            throw NumericalError(
                "solve_collapse_profile: no localized solution (state not bound)");
        rising = (resid_norm > prev_resid) ? rising + 1 : 0;
        prev_resid = resid_norm;
        if (rising >= 50) {
            std::ostringstream os;
            os << "solve_collapse_profile: residual diverging for 50 sweeps (last "
               << resid_norm << ", tol " << resid_tol << ")";
            throw NumericalError(os.str());
        }
    }
    if (!converged) {
        std::ostringstream os;
        os << "solve_collapse_profile: not converged after " << params.max_sweeps
           << " sweeps (residual " << resid_norm << ", tol " << resid_tol << ")";
        throw NumericalError(os.str());
    }

    prof.rho = rho;
    prof.Q = q_field;
    prof.residual = resid_field;
    prof.residual_norm = resid_norm;
    prof.residual_tol = resid_tol;
    prof.energy = energy;
    prof.sweeps = sweep;
    prof.convention_note =
        std::string(convention == PoissonConvention::mass_consistent ? "mass_consistent"
                                                                     : "paper_literal") +
        " source 4 pi G m^" + std::to_string(k) +
        " rho; solved orientation lap(Q) = -4 pi G m^k rho (balance with attractive "
        "self-gravity)";

    RealField r2rho(g);
    for (std::size_t i = 0; i < n; ++i) r2rho[i] = g.x(i) * g.x(i) * rho[i];
    prof.width = std::sqrt(integrate(r2rho) / integrate(rho) / 3.0);
    return prof;
}

}  // namespace snbohm::collapse
