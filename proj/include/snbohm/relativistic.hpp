#pragma once

#include <array>
#include <functional>
#include <vector>

#include "snbohm/errors.hpp"

namespace snbohm::rel {

// Signature (+,-,-,-), c = 1.  Indices 0..3 = (t, x, y, z).
using Vec4 = std::array<double, 4>;
using Mat4 = std::array<std::array<double, 4>, 4>;
using Christoffel = std::array<Mat4, 4>;               // Gamma[mu][a][b]
using Riemann = std::array<std::array<Mat4, 4>, 4>;    // R[mu][rho][lam][nu]

// Fixed background metric with optional analytic Christoffel / Riemann
// evaluators.  When not supplied, Christoffels come from second-order central
// differences of g and the Riemann tensor from differences of Christoffels,
// using the convention of the commutator identity
//   [nabla_lam nabla_nu - nabla_nu nabla_lam] A^mu = R^mu_{rho lam nu} A^rho.
class MetricModel {
public:
    using MetricFn = std::function<Mat4(const Vec4&)>;
    using ChristoffelFn = std::function<Christoffel(const Vec4&)>;
    using RiemannFn = std::function<Riemann(const Vec4&)>;

    explicit MetricModel(MetricFn g, double fd_step = 1e-4);

    void set_christoffel(ChristoffelFn fn) { christoffel_fn_ = std::move(fn); }
    void set_riemann(RiemannFn fn) { riemann_fn_ = std::move(fn); }

    Mat4 metric(const Vec4& x) const { return g_(x); }
    Mat4 inverse_metric(const Vec4& x) const;
    Christoffel christoffel(const Vec4& x) const;
    Riemann riemann(const Vec4& x) const;
    double fd_step() const { return fd_step_; }

    static MetricModel minkowski();
    // Static weak field ds^2 = (1+2 phi) dt^2 - (1-2 phi) dx^2 with analytic
    // Christoffels (phi = phi(x, y, z), |phi| << 1).
    static MetricModel weak_field(std::function<double(const Vec4&)> phi,
                                  std::function<Vec4(const Vec4&)> grad_phi);
    // Flat FRW with a(t) = exp(H t); analytic Christoffels and Riemann.
    static MetricModel de_sitter(double H);

private:
    MetricFn g_;
    ChristoffelFn christoffel_fn_;
    RiemannFn riemann_fn_;
    double fd_step_;
};

// Dimensionless relativistic quantum potential as a supplied model field.
class QFieldModel {
public:
    using ScalarFn = std::function<double(const Vec4&)>;
    using GradFn = std::function<Vec4(const Vec4&)>;

    QFieldModel(ScalarFn q, GradFn grad) : q_(std::move(q)), grad_(std::move(grad)) {}
    explicit QFieldModel(ScalarFn q, double fd_step = 1e-6);

    double q(const Vec4& x) const { return q_(x); }
    Vec4 grad(const Vec4& x) const { return grad_(x); }  // lower-index d_mu Q

    static QFieldModel zero();
    // Static bump q0 exp(-x^2 / 2 w^2) along the x axis, analytic gradient.
    static QFieldModel gaussian_bump(double q0, double width);

private:
    ScalarFn q_;
    GradFn grad_;
};

double dot(const Mat4& g, const Vec4& a, const Vec4& b);

// Solves g_{mu nu} u^mu u^nu = 1 for u^0 > 0 given the spatial components.
void normalize_u0(const Mat4& g, Vec4& u);

// M = m sqrt(1 + Q); throws TachyonicError when 1 + Q <= 0.
double quantum_mass(double q_val, double m);

enum class AccelForm { exact_log, linearized };

// a^mu = -1/2 u^mu u^nu nabla_nu f + 1/2 nabla^mu f with f = ln(1 + Q)
// (exact_log) or f = Q (linearized).  Orthogonal to u for unit u.
Vec4 bohmian_acceleration(const Vec4& x, const Vec4& u, const QFieldModel& qf,
                          const MetricModel& metric, AccelForm form);

struct RelCongruenceState {
    Vec4 x{};    // event
    Vec4 u{};    // four-velocity, g uu = 1
    Vec4 eta{};  // deviation vector, g u eta = 0
    Vec4 v{};    // covariant deviation velocity D eta / d tau
    double tau = 0.0;
};

void validate_state(const RelCongruenceState& s, const MetricModel& metric, double tol = 1e-8);

// d^2 eta / d tau^2 = eta^lam nabla_lam a^mu + R^mu_{rho lam nu} u^rho u^lam eta^nu.
// The curvature contraction follows the commutator convention above together
// with the Lie-bracket expansion of the congruence, and reproduces the
// Newtonian tide in the weak-field limit.  The directional derivative of a is
// finite-differenced over a displacement +/- eps eta with u parallel
// transported.
Vec4 deviation_rhs(const RelCongruenceState& s, const MetricModel& metric, const QFieldModel& qf,
                   AccelForm form = AccelForm::exact_log, double eps_displacement = 1e-4);

struct CongruenceSeries {
    std::vector<RelCongruenceState> states;
    double max_uu_drift = 0.0;    // max |g uu - 1|
    double max_ueta_drift = 0.0;  // max |g u eta|
};

// RK4 co-integration of (x, u, eta, v).  u is monitored, never re-projected;
// drift beyond 1e-6 aborts.
CongruenceSeries integrate_congruence(const RelCongruenceState& s0, const MetricModel& metric,
                                      const QFieldModel& qf, double dtau, double tau_end,
                                      AccelForm form = AccelForm::exact_log,
                                      double eps_displacement = 1e-4);

}  // namespace snbohm::rel
