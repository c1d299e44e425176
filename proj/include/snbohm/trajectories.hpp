#pragma once

#include <memory>

#include "snbohm/polar.hpp"
#include "snbohm/quantum.hpp"

namespace snbohm::traj {

// Supplies the pilot-wave fields at any requested time.
class FieldProvider {
public:
    virtual ~FieldProvider() = default;
    virtual const Grid& grid() const = 0;
    virtual PolarFields fields(double t) const = 0;
};

// Exact freely-spreading Gaussian (closed-form R and S on the grid).
class FreeGaussianProvider final : public FieldProvider {
public:
    FreeGaussianProvider(quantum::GaussianPacketSpec spec, Grid grid, double hbar = 1.0)
        : spec_(spec), grid_(grid), hbar_(hbar) {}
    const Grid& grid() const override { return grid_; }
    PolarFields fields(double t) const override {
        return quantum::free_gaussian_fields(spec_, grid_, t, hbar_);
    }

private:
    quantum::GaussianPacketSpec spec_;
    Grid grid_;
    double hbar_;
};

// Snapshots from a numerical evolution, interpolated linearly in time.
class SnapshotProvider final : public FieldProvider {
public:
    SnapshotProvider(std::vector<double> times, std::vector<PolarFields> snapshots);
    const Grid& grid() const override { return grid_; }
    PolarFields fields(double t) const override;

private:
    std::vector<double> times_;
    std::vector<PolarFields> snapshots_;
    Grid grid_;
};

// Guidance-equation velocity v = grad(S)/m.  Where the phase is invalid the
// value is carried from the nearest valid point and flagged.
struct VelocityField {
    RealField v;
    std::vector<unsigned char> extrapolated;
};
VelocityField velocity_field(const PolarFields& pf, const Particle& p);

// K stratified quantile points of rho0: x_k = CDF^-1((k - 1/2)/K).
std::vector<double> sample_initial(const RealField& rho0, std::size_t K);

struct TrajectoryEnsemble {
    std::vector<double> times;
    std::vector<double> x0;                       // initial positions, strictly increasing
    std::vector<std::vector<double>> positions;   // [trajectory][time index]
    std::vector<unsigned char> exited;            // 1 if the trajectory left the grid
    std::vector<double> exit_time;                // valid where exited
};

// RK4 integration of dx/dt = v(x, t) for each initial point, with linear
// spatial interpolation of the velocity field.  Positions are recorded on the
// shared time grid; a trajectory leaving the grid is frozen and flagged.
TrajectoryEnsemble integrate_ensemble(const std::vector<double>& x0s,
                                      const FieldProvider& provider, const Particle& p,
                                      double dt, double t_end);

// x(t) = x0 (1 + (hbar t / 2 m sigma0^2)^2)^(1/2).
inline double analytic_gaussian_trajectory(double x0, double t, double m, double sigma0,
                                           double hbar = 1.0) {
    const double w = hbar * t / (2.0 * m * sigma0 * sigma0);
    return x0 * std::sqrt(1.0 + w * w);
}

struct NonCrossingReport {
    bool ok = true;
    std::size_t pair_lo = 0;   // first violating adjacent pair (lo, lo+1)
    double time = 0.0;
};
NonCrossingReport check_non_crossing(const TrajectoryEnsemble& ens);

// Trapezoid line integral of grad S around a closed loop of grid nodes, with
// phase increments wrapped to (-pi hbar, pi hbar].  Returns the integral and
// the nearest integer multiple of Planck's constant h = 2 pi hbar.
struct LoopIntegral {
    double value = 0.0;
    long winding = 0;
    double planck = 0.0;
};
LoopIntegral phase_loop_integral(const PolarFields& pf, const std::vector<std::size_t>& loop,
                                 double hbar = 1.0);

}  // namespace snbohm::traj
