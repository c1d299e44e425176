#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "snbohm/errors.hpp"

namespace snbohm {

enum class Geometry { line1d, radial3d };

// Uniform grid on [x_min, x_max].  radial3d grids start at r = 0 and carry the
// 4*pi*r^2 dr measure; line1d carries plain dx.
class Grid {
public:
    Grid() = default;

    Geometry geometry() const { return geometry_; }
    std::size_t n() const { return n_; }
    double x_min() const { return x_min_; }
    double x_max() const { return x_max_; }
    double spacing() const { return h_; }
    double x(std::size_t i) const { return x_min_ + h_ * static_cast<double>(i); }

    // Measure weight at node i (4*pi*r^2 for radial3d, 1 for line1d).
    double measure(std::size_t i) const;
    // Trapezoid quadrature weight including the measure factor.
    double quad_weight(std::size_t i) const;

    bool operator==(const Grid& other) const {
        return geometry_ == other.geometry_ && n_ == other.n_ &&
               x_min_ == other.x_min_ && x_max_ == other.x_max_;
    }

    friend Grid make_grid(Geometry geometry, double x_min, double x_max, std::size_t n);

private:
    Geometry geometry_ = Geometry::line1d;
    std::size_t n_ = 0;
    double x_min_ = 0.0;
    double x_max_ = 0.0;
    double h_ = 0.0;
};

Grid make_grid(Geometry geometry, double x_min, double x_max, std::size_t n);

// Real scalar field sampled on a grid.
class RealField {
public:
    RealField() = default;
    explicit RealField(const Grid& grid, double fill = 0.0)
        : grid_(grid), values_(grid.n(), fill) {}
    RealField(const Grid& grid, std::vector<double> values);

    const Grid& grid() const { return grid_; }
    std::size_t size() const { return values_.size(); }
    double& operator[](std::size_t i) { return values_[i]; }
    double operator[](std::size_t i) const { return values_[i]; }
    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

    void check_finite(const char* what = "RealField") const;

private:
    Grid grid_;
    std::vector<double> values_;
};

// Complex wavefunction on a grid.  Construction normalizes to unit L2 norm in
// the grid measure unless normalize = false (plane-wave style test fields).
class ComplexField {
public:
    using value_type = std::complex<double>;

    ComplexField() = default;
    ComplexField(const Grid& grid, std::vector<value_type> values, bool normalize = true);

    const Grid& grid() const { return grid_; }
    std::size_t size() const { return values_.size(); }
    value_type& operator[](std::size_t i) { return values_[i]; }
    const value_type& operator[](std::size_t i) const { return values_[i]; }
    const std::vector<value_type>& values() const { return values_; }
    std::vector<value_type>& values() { return values_; }

    double norm() const;        // sqrt(integral |psi|^2 dmu)
    void normalize();
    RealField density() const;  // |psi|^2

private:
    Grid grid_;
    std::vector<value_type> values_;
};

}  // namespace snbohm
