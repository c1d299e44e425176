#include "snbohm/polar.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace snbohm {

namespace {

double wrap_to_pi(double a) {
    const double two_pi = 2.0 * std::numbers::pi;
    a = std::fmod(a + std::numbers::pi, two_pi);
    if (a < 0.0) a += two_pi;
    return a - std::numbers::pi;
}

}  // namespace

PolarFields polar_decompose(const ComplexField& psi, double hbar, double floor_fraction) {
    const Grid& g = psi.grid();
    const std::size_t n = g.n();

    PolarFields pf;
    pf.R = RealField(g);
    pf.S = RealField(g);
    pf.rho = RealField(g);
    pf.valid.assign(n, 0);

    double r_max = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        pf.R[i] = std::abs(psi[i]);
        pf.rho[i] = pf.R[i] * pf.R[i];
        r_max = std::max(r_max, pf.R[i]);
    }
    pf.amplitude_floor = floor_fraction * r_max;

    std::size_t n_valid = 0;
    std::size_t anchor = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (pf.R[i] > pf.amplitude_floor) {
            pf.valid[i] = 1;
            ++n_valid;
        }
        if (pf.R[i] > pf.R[anchor]) anchor = i;
    }
    if (2 * n_valid < n)
        throw ContractError("polar_decompose: phase undefined on more than 50% of the grid");

    // Unwrap outward from the amplitude maximum; carry the last valid phase
    // across floored points so S stays continuous.
    std::vector<double> theta(n, 0.0);
    theta[anchor] = std::arg(psi[anchor]);
    for (std::size_t i = anchor + 1; i < n; ++i) {
        if (pf.valid[i])
            theta[i] = theta[i - 1] + wrap_to_pi(std::arg(psi[i]) - theta[i - 1]);
        else
            theta[i] = theta[i - 1];
    }
    for (std::size_t i = anchor; i-- > 0;) {
        if (pf.valid[i])
            theta[i] = theta[i + 1] + wrap_to_pi(std::arg(psi[i]) - theta[i + 1]);
        else
            theta[i] = theta[i + 1];
    }
    for (std::size_t i = 0; i < n; ++i) pf.S[i] = hbar * theta[i];
    return pf;
}

ComplexField recompose(const PolarFields& pf, double hbar) {
    const Grid& g = pf.R.grid();
    std::vector<std::complex<double>> v(g.n());
    for (std::size_t i = 0; i < g.n(); ++i)
        v[i] = pf.R[i] * std::exp(std::complex<double>(0.0, pf.S[i] / hbar));
    return ComplexField(g, std::move(v), /*normalize=*/false);
}

}  // namespace snbohm
