#include "snbohm/calculus.hpp"

#include <algorithm>
#include <cmath>

namespace snbohm {

RealField gradient(const RealField& f) {
    const Grid& g = f.grid();
    const std::size_t n = g.n();
    const double h = g.spacing();
    RealField out(g);

    out[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    for (std::size_t i = 1; i + 1 < n; ++i) out[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
    out[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    return out;
}

namespace {

// One-sided second derivative, exact for cubics.
double d2_forward(const RealField& f, std::size_t i, double h) {
    return (2.0 * f[i] - 5.0 * f[i + 1] + 4.0 * f[i + 2] - f[i + 3]) / (h * h);
}

double d2_backward(const RealField& f, std::size_t i, double h) {
    return (2.0 * f[i] - 5.0 * f[i - 1] + 4.0 * f[i - 2] - f[i - 3]) / (h * h);
}

}  // namespace

RealField laplacian(const RealField& f) {
    const Grid& g = f.grid();
    const std::size_t n = g.n();
    const double h = g.spacing();
    RealField out(g);

    if (g.geometry() == Geometry::line1d) {
        out[0] = d2_forward(f, 0, h);
        for (std::size_t i = 1; i + 1 < n; ++i)
            out[i] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / (h * h);
        out[n - 1] = d2_backward(f, n - 1, h);
        return out;
    }

    // radial3d: f'' + (2/r) f'.  At r = 0 regularity (f'(0) = 0) gives
    // lap f(0) = 3 f''(0) = 6 (f1 - f0)/h^2.
    out[0] = 6.0 * (f[1] - f[0]) / (h * h);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double r = g.x(i);
        const double d2 = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / (h * h);
        const double d1 = (f[i + 1] - f[i - 1]) / (2.0 * h);
        out[i] = d2 + 2.0 * d1 / r;
    }
    const double r_end = g.x(n - 1);
    const double d1_end = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    out[n - 1] = d2_backward(f, n - 1, h) + 2.0 * d1_end / r_end;
    return out;
}

double integrate(const RealField& f) {
    const Grid& g = f.grid();
    double s = 0.0;
    for (std::size_t i = 0; i < g.n(); ++i) s += g.quad_weight(i) * f[i];
    return s;
}

double inner(const RealField& f, const RealField& g) {
    if (!(f.grid() == g.grid())) throw ContractError("inner: fields on different grids");
    const Grid& grid = f.grid();
    double s = 0.0;
    for (std::size_t i = 0; i < grid.n(); ++i) s += grid.quad_weight(i) * f[i] * g[i];
    return s;
}

std::vector<double> cumulative_trapezoid(const RealField& f) {
    const Grid& g = f.grid();
    const std::size_t n = g.n();
    const double h = g.spacing();
    std::vector<double> c(n, 0.0);
    for (std::size_t i = 1; i < n; ++i)
        c[i] = c[i - 1] + 0.5 * h * (f[i] * g.measure(i) + f[i - 1] * g.measure(i - 1));
    return c;
}

double interp_linear(const RealField& f, double x) {
    const Grid& g = f.grid();
    const std::size_t n = g.n();
    if (x <= g.x_min()) return f[0];
    if (x >= g.x_max()) return f[n - 1];
    const double t = (x - g.x_min()) / g.spacing();
    const std::size_t i = std::min(static_cast<std::size_t>(t), n - 2);
    const double frac = t - static_cast<double>(i);
    return f[i] * (1.0 - frac) + f[i + 1] * frac;
}

}  // namespace snbohm
