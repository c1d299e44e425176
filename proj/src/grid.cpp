#include "snbohm/grid.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <utility>

namespace snbohm {

Grid make_grid(Geometry geometry, double x_min, double x_max, std::size_t n) {
    if (n < 16) {
        std::ostringstream os;
        os << "make_grid: n = " << n << " too small (need n >= 16)";
        throw ContractError(os.str());
    }
    if (!(x_max > x_min)) throw ContractError("make_grid: require x_max > x_min");
    if (geometry == Geometry::radial3d && x_min != 0.0)
        throw ContractError("make_grid: radial3d grid must start at r = 0");

    Grid g;
    g.geometry_ = geometry;
    g.n_ = n;
    g.x_min_ = x_min;
    g.x_max_ = x_max;
    g.h_ = (x_max - x_min) / static_cast<double>(n - 1);
    return g;
}

double Grid::measure(std::size_t i) const {
    if (geometry_ == Geometry::line1d) return 1.0;
    const double r = x(i);
    return 4.0 * std::numbers::pi * r * r;
}

double Grid::quad_weight(std::size_t i) const {
    const double w = (i == 0 || i + 1 == n_) ? 0.5 * h_ : h_;
    return w * measure(i);
}

RealField::RealField(const Grid& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.n())
        throw ContractError("RealField: value count does not match grid");
}

void RealField::check_finite(const char* what) const {
    for (double v : values_)
        if (!std::isfinite(v)) throw NumericalError(std::string(what) + ": non-finite value");
}

ComplexField::ComplexField(const Grid& grid, std::vector<value_type> values, bool do_normalize)
    : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.n())
        throw ContractError("ComplexField: value count does not match grid");
    for (const auto& v : values_)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw NumericalError("ComplexField: non-finite value");
    if (do_normalize) normalize();
}

double ComplexField::norm() const {
    double s = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i)
        s += grid_.quad_weight(i) * std::norm(values_[i]);
    return std::sqrt(s);
}

void ComplexField::normalize() {
    const double nrm = norm();
    if (!(nrm > 0.0)) throw NumericalError("ComplexField::normalize: zero norm");
    const double inv = 1.0 / nrm;
    for (auto& v : values_) v *= inv;
}

RealField ComplexField::density() const {
    RealField rho(grid_);
    for (std::size_t i = 0; i < values_.size(); ++i) rho[i] = std::norm(values_[i]);
    return rho;
}

}  // namespace snbohm
