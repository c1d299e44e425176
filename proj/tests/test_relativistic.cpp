#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "snbohm/deviation.hpp"
#include "snbohm/quantum.hpp"
#include "snbohm/relativistic.hpp"

using namespace snbohm;
using namespace snbohm::rel;

namespace {

Vec4 random_unit_u(const MetricModel& metric, const Vec4& x) {
    Vec4 u{0.0, oracles::uniform(-0.4, 0.4), oracles::uniform(-0.4, 0.4),
           oracles::uniform(-0.4, 0.4)};
    normalize_u0(metric.metric(x), u);
    return u;
}

}  // namespace

TEST_CASE("quantum mass: M = m sqrt(1 + Q) and the dispersion relation") {
    CHECK(quantum_mass(0.0, 1.3) == doctest::Approx(1.3).epsilon(1e-14));
    CHECK(quantum_mass(3.0, 1.0) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK_THROWS_AS(quantum_mass(-1.0, 1.0), TachyonicError);
    CHECK_THROWS_AS(quantum_mass(-1.5, 1.0), TachyonicError);

    const MetricModel mink = MetricModel::minkowski();
    for (int trial = 0; trial < 10; ++trial) {
        const Vec4 x{};
        const Vec4 u = random_unit_u(mink, x);
        const double q = oracles::uniform(-0.5, 0.5);
        const double M = quantum_mass(q, 1.0);
        Vec4 p{};
        for (std::size_t mu = 0; mu < 4; ++mu) p[mu] = M * u[mu];
        CHECK(dot(mink.metric(x), p, p) == doctest::Approx(M * M).epsilon(1e-12));
    }
}

TEST_CASE("constant Q gives zero Bohmian acceleration in both forms") {
    const MetricModel mink = MetricModel::minkowski();
    const QFieldModel qconst([](const Vec4&) { return 0.25; },
                             [](const Vec4&) { return Vec4{}; });
    const Vec4 x{};
    const Vec4 u = random_unit_u(mink, x);
    for (const auto form : {AccelForm::exact_log, AccelForm::linearized}) {
        const Vec4 a = bohmian_acceleration(x, u, qconst, mink, form);
        for (double c : a) CHECK(std::abs(c) <= 1e-15);
    }
}

TEST_CASE("Bohmian acceleration is orthogonal to u") {
    const MetricModel mink = MetricModel::minkowski();
    const QFieldModel qf(
        [](const Vec4& x) { return 0.05 * std::sin(x[1]) + 0.03 * x[2] * x[2]; },
        [](const Vec4& x) {
            return Vec4{0.0, 0.05 * std::cos(x[1]), 0.06 * x[2], 0.0};
        });
    for (int trial = 0; trial < 20; ++trial) {
        const Vec4 x{0.0, oracles::uniform(-1.0, 1.0), oracles::uniform(-1.0, 1.0), 0.0};
        const Vec4 u = random_unit_u(mink, x);
        for (const auto form : {AccelForm::exact_log, AccelForm::linearized}) {
            const Vec4 a = bohmian_acceleration(x, u, qf, mink, form);
            CHECK(std::abs(dot(mink.metric(x), u, a)) <= 1e-10);
        }
    }
}

TEST_CASE("exact-log vs linearized acceleration obeys the gradient remainder bound") {
    // d_mu ln(1+Q) - d_mu Q = d_mu Q (1/(1+Q) - 1), so the elementwise gap is
    // bounded by |Q| |dQ| / (1 - |Q|); the acceleration difference inherits it
    // through the u-projection with unit-u coefficients.
    const MetricModel mink = MetricModel::minkowski();
    const double q0 = 0.1, w = 1.0;
    const QFieldModel qf = QFieldModel::gaussian_bump(q0, w);
    for (int trial = 0; trial < 20; ++trial) {
        const Vec4 x{0.0, oracles::uniform(-2.0, 2.0), 0.0, 0.0};
        const Vec4 u = random_unit_u(mink, x);
        const Vec4 a_log = bohmian_acceleration(x, u, qf, mink, AccelForm::exact_log);
        const Vec4 a_lin = bohmian_acceleration(x, u, qf, mink, AccelForm::linearized);

        const double q = qf.q(x);
        const Vec4 dq = qf.grad(x);
        double grad_mag = 0.0;
        for (double c : dq) grad_mag = std::max(grad_mag, std::abs(c));
        const double gap_bound = std::abs(q) * grad_mag / (1.0 - std::abs(q));
        double u_mag = 0.0;
        for (double c : u) u_mag = std::max(u_mag, std::abs(c));
        // |delta a^mu| <= 1/2 (|u^mu| |u.d(delta)| + |d^mu(delta)|)
        const double bound = 0.5 * (u_mag * 4.0 * u_mag + 1.0) * gap_bound;
        for (std::size_t mu = 0; mu < 4; ++mu)
            CHECK(std::abs(a_log[mu] - a_lin[mu]) <= bound + 1e-15);
    }
}

TEST_CASE("deviation rhs vanishes for flat metric and zero Q") {
    const MetricModel mink = MetricModel::minkowski();
    const QFieldModel qf = QFieldModel::zero();
    RelCongruenceState s;
    s.x = {0.0, 0.3, -0.2, 0.1};
    s.u = {1.0, 0.0, 0.0, 0.0};
    s.eta = {0.0, 0.5, 0.2, -0.1};
    s.v = {};
    const Vec4 rhs = deviation_rhs(s, mink, qf);
    for (double c : rhs) CHECK(std::abs(c) <= 1e-14);
}

TEST_CASE("static weak Q reduces to the nonrelativistic tidal form") {
    const MetricModel mink = MetricModel::minkowski();
    const double q0 = 0.01, w = 1.0;
    const QFieldModel qf = QFieldModel::gaussian_bump(q0, w);

    RelCongruenceState s;
    s.x = {};
    s.u = {1.0, 0.0, 0.0, 0.0};
    s.eta = {0.0, 0.2, 0.0, 0.0};
    s.v = {};
    // the nonrelativistic limit is the linearized (Q << 1) form
    const Vec4 rhs = deviation_rhs(s, mink, qf, AccelForm::linearized);

    // eta_dd = -1/2 Q''(0) eta = q0 / (2 w^2) eta
    const double expected = 0.5 * q0 / (w * w) * s.eta[1];
    CHECK(rhs[1] == doctest::Approx(expected).epsilon(1e-6));
    CHECK(std::abs(rhs[0]) <= 1e-12);
}

TEST_CASE("pure Jacobi term matches the analytic de Sitter Riemann") {
    const double H = 0.2;
    const MetricModel ds = MetricModel::de_sitter(H);
    const QFieldModel qf = QFieldModel::zero();
    RelCongruenceState s;
    s.x = {0.4, 0.1, 0.0, 0.0};
    s.u = {1.0, 0.0, 0.0, 0.0};  // comoving geodesic
    s.eta = {0.0, 0.3, -0.1, 0.2};
    s.v = {};
    const Vec4 rhs = deviation_rhs(s, ds, qf);
    // R^i_{00j} u^0 u^0 eta^j = H^2 eta^i
    for (std::size_t i = 1; i < 4; ++i)
        CHECK(rhs[i] == doctest::Approx(H * H * s.eta[i]).epsilon(1e-6));
    CHECK(std::abs(rhs[0]) <= 1e-10);
}

TEST_CASE("flat congruence: eta stays constant / affine to 1e-10") {
    const MetricModel mink = MetricModel::minkowski();
    const QFieldModel qf = QFieldModel::zero();

    RelCongruenceState s0;
    s0.x = {};
    s0.u = {1.0, 0.0, 0.0, 0.0};
    s0.eta = {0.0, 1.0, 0.0, 0.0};
    s0.v = {};
    const auto run = integrate_congruence(s0, mink, qf, 0.05, 10.0);
    for (const auto& st : run.states) {
        CHECK(std::abs(st.eta[1] - 1.0) <= 1e-10);
        CHECK(std::abs(st.eta[0]) <= 1e-10);
    }
    CHECK(run.max_uu_drift < 1e-6);
    CHECK(run.max_ueta_drift < 1e-6);

    s0.v = {0.0, 0.0, 0.25, 0.0};
    const auto run2 = integrate_congruence(s0, mink, qf, 0.05, 10.0);
    for (const auto& st : run2.states)
        CHECK(std::abs(st.eta[2] - 0.25 * st.tau) <= 1e-10);
}

TEST_CASE("weak-field congruence matches the Newtonian deviation run within 1%") {
    const double phi0 = 5e-4, w = 1.0;
    auto phi_fn = [phi0, w](const Vec4& x) {
        return -phi0 * std::exp(-x[1] * x[1] / (2.0 * w * w));
    };
    auto grad_fn = [phi0, w](const Vec4& x) {
        Vec4 g{};
        g[1] = phi0 * x[1] / (w * w) * std::exp(-x[1] * x[1] / (2.0 * w * w));
        return g;
    };
    const MetricModel wf = MetricModel::weak_field(phi_fn, grad_fn);
    const QFieldModel qf = QFieldModel::zero();

    RelCongruenceState s0;
    s0.x = {};
    s0.u = {0.0, 0.0, 0.0, 0.0};
    normalize_u0(wf.metric(s0.x), s0.u);
    s0.eta = {0.0, 0.01, 0.0, 0.0};
    s0.v = {};
    const double tau_end = 50.0;
    const auto run = integrate_congruence(s0, wf, qf, 0.05, tau_end);
    CHECK(run.max_uu_drift < 1e-6);
    CHECK(run.max_ueta_drift < 1e-6);

    // Newtonian twin via the deviation module on a 1D grid
    const Grid g = make_grid(Geometry::line1d, -8.0, 8.0, 1601);
    RealField q_zero(g), phi_newton(g);
    for (std::size_t i = 0; i < g.n(); ++i)
        phi_newton[i] = -phi0 * std::exp(-g.x(i) * g.x(i) / (2.0 * w * w));
    const auto tf =
        dev::tidal_field(q_zero, phi_newton, Particle(1.0), dev::PhiConvention::newtonian);
    const double D0 = interp_linear(tf.D, 0.0);
    const auto nr = dev::integrate_deviation(s0.eta[1], 0.0, [&](double) { return D0; },
                                             0.05, tau_end);

    for (std::size_t i = 0; i < run.states.size(); i += 100) {
        const double rel_eta = run.states[i].eta[1];
        const double nr_eta = nr.eta[i];
        CHECK(std::abs(rel_eta - nr_eta) <= 0.01 * std::abs(nr_eta));
    }
}

TEST_CASE("flat congruence with weak Q matches the nonrelativistic module within 1%") {
    const MetricModel mink = MetricModel::minkowski();
    const double q0 = 0.01, w = 1.0;
    const QFieldModel qf = QFieldModel::gaussian_bump(q0, w);

    RelCongruenceState s0;
    s0.x = {};
    s0.u = {1.0, 0.0, 0.0, 0.0};
    s0.eta = {0.0, 0.01, 0.0, 0.0};
    s0.v = {};
    const double tau_end = 20.0;
    const auto run =
        integrate_congruence(s0, mink, qf, 0.02, tau_end, AccelForm::linearized);

    // NR twin: Q = m q /2 on a grid, fiducial at rest at the bump center
    const Particle p(1.0);
    const Grid g = make_grid(Geometry::line1d, -8.0, 8.0, 1601);
    RealField Q(g), phi_zero(g);
    for (std::size_t i = 0; i < g.n(); ++i)
        Q[i] = 0.5 * p.mass * q0 * std::exp(-g.x(i) * g.x(i) / (2.0 * w * w));
    const auto tf = dev::tidal_field(Q, phi_zero, p, dev::PhiConvention::paper_positive);
    const double D0 = interp_linear(tf.D, 0.0);
    const auto nr =
        dev::integrate_deviation(s0.eta[1], 0.0, [&](double) { return D0; }, 0.02, tau_end);

    for (std::size_t i = 0; i < run.states.size(); i += 100)
        CHECK(std::abs(run.states[i].eta[1] - nr.eta[i]) <= 0.01 * std::abs(nr.eta[i]));
}

TEST_CASE("de Sitter comoving congruence keeps coordinate deviation constant") {
    const double H = 0.1;
    const MetricModel ds = MetricModel::de_sitter(H);
    const QFieldModel qf = QFieldModel::zero();
    RelCongruenceState s0;
    s0.x = {};
    s0.u = {1.0, 0.0, 0.0, 0.0};
    s0.eta = {0.0, 1.0, 0.0, 0.0};
    s0.v = {0.0, H, 0.0, 0.0};  // D eta / d tau = (adot/a) eta for comoving neighbors
    const auto run = integrate_congruence(s0, ds, qf, 0.02, 5.0);
    for (const auto& st : run.states) CHECK(std::abs(st.eta[1] - 1.0) <= 1e-8);
    CHECK(run.max_uu_drift < 1e-6);
}

TEST_CASE("congruence deviation matches a finite-difference geodesic pair") {
    const double H = 0.1, ds_sep = 1e-3, du = 0.05;
    const MetricModel ds = MetricModel::de_sitter(H);
    const QFieldModel qf = QFieldModel::zero();

    // family x(s): x(0) at origin comoving; velocity grows with s
    auto geodesic = [&](double s_param) {
        RelCongruenceState st;
        st.x = {0.0, s_param, 0.0, 0.0};
        st.u = {0.0, du * s_param, 0.0, 0.0};
        normalize_u0(ds.metric(st.x), st.u);
        st.eta = {0.0, 0.0, 1e-8, 0.0};  // inert spectator deviation
        st.v = {};
        return integrate_congruence(st, ds, qf, 0.02, 5.0);
    };
    const auto run_a = geodesic(0.0);
    const auto run_b = geodesic(ds_sep);

    // the congruence's own deviation state for the same family
    RelCongruenceState s0;
    s0.x = {};
    s0.u = {1.0, 0.0, 0.0, 0.0};
    s0.eta = {0.0, 1.0, 0.0, 0.0};
    // v = eta^nu d_nu u + Gamma eta u; d u^x/ds = du, Gamma^x_{x0} = H
    s0.v = {0.0, du + H, 0.0, 0.0};
    const auto run = integrate_congruence(s0, ds, qf, 0.02, 5.0);

    for (std::size_t i = 0; i < run.states.size(); i += 25) {
        const double fd = (run_b.states[i].x[1] - run_a.states[i].x[1]) / ds_sep;
        CHECK(run.states[i].eta[1] == doctest::Approx(fd).epsilon(0.01));
    }
}

TEST_CASE("curvature commutator identity against the analytic Riemann") {
    const double H = 0.2;
    const MetricModel ds = MetricModel::de_sitter(H);

    // analytic test vector field and its exact partials
    auto u_fn = [](const Vec4& x) {
        return Vec4{1.0 + 0.1 * std::sin(x[1]), 0.2 * std::cos(x[0]), 0.05 * x[1], 0.0};
    };
    auto du_fn = [](const Vec4& x) {
        Mat4 d{};  // d[nu][mu] = d_nu u^mu
        d[1][0] = 0.1 * std::cos(x[1]);
        d[0][1] = -0.2 * std::sin(x[0]);
        d[1][2] = 0.05;
        return d;
    };
    auto covariant_deriv = [&](const Vec4& x) {
        const Christoffel gam = ds.christoffel(x);
        const Vec4 u = u_fn(x);
        const Mat4 du = du_fn(x);
        Mat4 T{};  // T[nu][mu] = nabla_nu u^mu
        for (std::size_t nu = 0; nu < 4; ++nu)
            for (std::size_t mu = 0; mu < 4; ++mu) {
                double s = du[nu][mu];
                for (std::size_t al = 0; al < 4; ++al) s += gam[mu][nu][al] * u[al];
                T[nu][mu] = s;
            }
        return T;
    };

    const Vec4 x{0.3, 0.7, -0.2, 0.1};
    const double h = 1e-4;
    const Christoffel gam = ds.christoffel(x);
    const Riemann riem = ds.riemann(x);
    const Vec4 u = u_fn(x);
    const Mat4 T0 = covariant_deriv(x);

    for (std::size_t lam = 0; lam < 4; ++lam)
        for (std::size_t nu = 0; nu < 4; ++nu) {
            if (lam == nu) continue;
            for (std::size_t mu = 0; mu < 4; ++mu) {
                auto second = [&](std::size_t a, std::size_t b) {
                    // nabla_a (T)^mu_b at x by central differences of T
                    Vec4 xp = x, xm = x;
                    xp[a] += h;
                    xm[a] -= h;
                    const Mat4 Tp = covariant_deriv(xp);
                    const Mat4 Tm = covariant_deriv(xm);
                    double s = (Tp[b][mu] - Tm[b][mu]) / (2.0 * h);
                    for (std::size_t al = 0; al < 4; ++al)
                        s += gam[mu][a][al] * T0[b][al] - gam[al][a][b] * T0[al][mu];
                    return s;
                };
                const double lhs = second(lam, nu) - second(nu, lam);
                double rhs = 0.0;
                for (std::size_t rho = 0; rho < 4; ++rho)
                    rhs += riem[mu][rho][lam][nu] * u[rho];
                CHECK(std::abs(lhs - rhs) <= 1e-5);
            }
        }
}

TEST_CASE("finite-difference Riemann matches the analytic de Sitter Riemann") {
    const double H = 0.2;
    const MetricModel analytic = MetricModel::de_sitter(H);
    // same metric with everything computed by finite differences
    const MetricModel numeric(
        [H](const Vec4& x) {
            const double a2 = std::exp(2.0 * H * x[0]);
            Mat4 g{};
            g[0][0] = 1.0;
            g[1][1] = g[2][2] = g[3][3] = -a2;
            return g;
        },
        1e-4);
    const Vec4 x{0.2, 0.4, -0.3, 0.6};
    const Riemann ra = analytic.riemann(x);
    const Riemann rn = numeric.riemann(x);
    for (std::size_t mu = 0; mu < 4; ++mu)
        for (std::size_t rho = 0; rho < 4; ++rho)
            for (std::size_t lam = 0; lam < 4; ++lam)
                for (std::size_t nu = 0; nu < 4; ++nu)
                    CHECK(std::abs(ra[mu][rho][lam][nu] - rn[mu][rho][lam][nu]) <= 1e-5);
}

TEST_CASE("state validation and tachyonic aborts") {
    const MetricModel mink = MetricModel::minkowski();
    RelCongruenceState bad;
    bad.x = {};
    bad.u = {1.1, 0.0, 0.0, 0.0};  // u.u = 1.21
    bad.eta = {0.0, 1.0, 0.0, 0.0};
    CHECK_THROWS_AS(validate_state(bad, mink), ContractError);

    RelCongruenceState ok;
    ok.x = {};
    ok.u = {1.0, 0.0, 0.0, 0.0};
    ok.eta = {0.0, 1.0, 0.0, 0.0};
    const QFieldModel deep([](const Vec4&) { return -2.0; },
                           [](const Vec4&) { return Vec4{}; });
    CHECK_THROWS_AS(integrate_congruence(ok, mink, deep, 0.1, 1.0), TachyonicError);
}
