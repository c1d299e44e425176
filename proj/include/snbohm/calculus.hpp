#pragma once

#include <vector>

#include "snbohm/grid.hpp"

namespace snbohm {

// Second-order finite-difference calculus on uniform grids.  Central stencils
// in the interior, one-sided second-order at boundaries.  radial3d gradients
// are d/dr; radial3d laplacian is (1/r^2) d/dr (r^2 d/dr) with the regular
// origin stencil (f'(0) = 0).

RealField gradient(const RealField& f);
RealField laplacian(const RealField& f);

// integral f dmu over the grid (trapezoid with the geometry measure).
double integrate(const RealField& f);
// integral f g dmu.
double inner(const RealField& f, const RealField& g);

// Cumulative trapezoid of f dmu from the left edge; result[0] = 0.
std::vector<double> cumulative_trapezoid(const RealField& f);

// Piecewise-linear interpolation of a field value at x; clamps to the domain.
double interp_linear(const RealField& f, double x);

}  // namespace snbohm
