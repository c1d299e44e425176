#include "snbohm/relativistic.hpp"

#include <cmath>
#include <sstream>

namespace snbohm::rel {

namespace {

Vec4 shifted(const Vec4& x, std::size_t k, double d) {
    Vec4 y = x;
    y[k] += d;
    return y;
}

}  // namespace

MetricModel::MetricModel(MetricFn g, double fd_step) : g_(std::move(g)), fd_step_(fd_step) {
    if (!(fd_step_ > 0.0)) throw ContractError("MetricModel: fd_step must be positive");
}

Mat4 MetricModel::inverse_metric(const Vec4& x) const {
    Mat4 a = g_(x);
    Mat4 inv{};
    for (std::size_t i = 0; i < 4; ++i) inv[i][i] = 1.0;

    // Gauss-Jordan with partial pivoting.
    for (std::size_t col = 0; col < 4; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < 4; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        if (a[piv][col] == 0.0) throw NumericalError("MetricModel: singular metric");
        std::swap(a[piv], a[col]);
        std::swap(inv[piv], inv[col]);
        const double d = a[col][col];
        for (std::size_t c = 0; c < 4; ++c) {
            a[col][c] /= d;
            inv[col][c] /= d;
        }
        for (std::size_t r = 0; r < 4; ++r) {
            if (r == col) continue;
            const double f = a[r][col];
            if (f == 0.0) continue;
            for (std::size_t c = 0; c < 4; ++c) {
                a[r][c] -= f * a[col][c];
                inv[r][c] -= f * inv[col][c];
            }
        }
    }
    return inv;
}

Christoffel MetricModel::christoffel(const Vec4& x) const {
    if (christoffel_fn_) return christoffel_fn_(x);

    const double h = fd_step_;
    std::array<Mat4, 4> dg;  // dg[k][a][b] = d_k g_ab
    for (std::size_t k = 0; k < 4; ++k) {
        const Mat4 gp = g_(shifted(x, k, h));
        const Mat4 gm = g_(shifted(x, k, -h));
        for (std::size_t a = 0; a < 4; ++a)
            for (std::size_t b = 0; b < 4; ++b) dg[k][a][b] = (gp[a][b] - gm[a][b]) / (2.0 * h);
    }
    const Mat4 ginv = inverse_metric(x);

    Christoffel gamma{};
    for (std::size_t mu = 0; mu < 4; ++mu)
        for (std::size_t a = 0; a < 4; ++a)
            for (std::size_t b = 0; b < 4; ++b) {
                double s = 0.0;
                for (std::size_t nu = 0; nu < 4; ++nu)
                    s += ginv[mu][nu] * (dg[a][nu][b] + dg[b][nu][a] - dg[nu][a][b]);
                gamma[mu][a][b] = 0.5 * s;
            }
    return gamma;
}

Riemann MetricModel::riemann(const Vec4& x) const {
    if (riemann_fn_) return riemann_fn_(x);

    const double h = fd_step_;
    std::array<Christoffel, 4> dgamma;  // dgamma[k] = d_k Gamma
    for (std::size_t k = 0; k < 4; ++k) {
        const Christoffel gp = christoffel(shifted(x, k, h));
        const Christoffel gm = christoffel(shifted(x, k, -h));
        for (std::size_t mu = 0; mu < 4; ++mu)
            for (std::size_t a = 0; a < 4; ++a)
                for (std::size_t b = 0; b < 4; ++b)
                    dgamma[k][mu][a][b] = (gp[mu][a][b] - gm[mu][a][b]) / (2.0 * h);
    }
    const Christoffel gam = christoffel(x);

    // R^mu_{rho lam nu} = d_lam Gamma^mu_{nu rho} - d_nu Gamma^mu_{lam rho}
    //                     + Gamma^mu_{lam al} Gamma^al_{nu rho}
    //                     - Gamma^mu_{nu al} Gamma^al_{lam rho}
    Riemann r{};
    for (std::size_t mu = 0; mu < 4; ++mu)
        for (std::size_t rho = 0; rho < 4; ++rho)
            for (std::size_t lam = 0; lam < 4; ++lam)
                for (std::size_t nu = 0; nu < 4; ++nu) {
                    double s = dgamma[lam][mu][nu][rho] - dgamma[nu][mu][lam][rho];
                    for (std::size_t al = 0; al < 4; ++al)
                        s += gam[mu][lam][al] * gam[al][nu][rho] -
                             gam[mu][nu][al] * gam[al][lam][rho];
                    r[mu][rho][lam][nu] = s;
                }
    return r;
}

MetricModel MetricModel::minkowski() {
    MetricModel m([](const Vec4&) {
        Mat4 g{};
        g[0][0] = 1.0;
        g[1][1] = g[2][2] = g[3][3] = -1.0;
        return g;
    });
    m.set_christoffel([](const Vec4&) { return Christoffel{}; });
    m.set_riemann([](const Vec4&) { return Riemann{}; });
    return m;
}

MetricModel MetricModel::weak_field(std::function<double(const Vec4&)> phi,
                                    std::function<Vec4(const Vec4&)> grad_phi) {
    auto metric_fn = [phi](const Vec4& x) {
        const double p = phi(x);
        Mat4 g{};
        g[0][0] = 1.0 + 2.0 * p;
        g[1][1] = g[2][2] = g[3][3] = -(1.0 - 2.0 * p);
        return g;
    };
    MetricModel m(metric_fn);
    m.set_christoffel([phi, grad_phi](const Vec4& x) {
        const double p = phi(x);
        const Vec4 dp = grad_phi(x);  // dp[0] must be 0 (static field)
        Christoffel gam{};
        const double f0 = 1.0 / (1.0 + 2.0 * p);
        const double fs = 1.0 / (1.0 - 2.0 * p);
        for (std::size_t i = 1; i < 4; ++i) {
            gam[0][0][i] = gam[0][i][0] = dp[i] * f0;
            gam[i][0][0] = dp[i] * fs;
            for (std::size_t j = 1; j < 4; ++j)
                for (std::size_t k = 1; k < 4; ++k) {
                    double s = 0.0;
                    if (i == k) s += dp[j];
                    if (i == j) s += dp[k];
                    if (j == k) s -= dp[i];
                    gam[i][j][k] = s * fs;
                }
        }
        return gam;
    });
    return m;
}

MetricModel MetricModel::de_sitter(double H) {
    auto a_of = [H](double t) { return std::exp(H * t); };
    MetricModel m([a_of](const Vec4& x) {
        const double a2 = a_of(x[0]) * a_of(x[0]);
        Mat4 g{};
        g[0][0] = 1.0;
        g[1][1] = g[2][2] = g[3][3] = -a2;
        return g;
    });
    m.set_christoffel([a_of, H](const Vec4& x) {
        const double a = a_of(x[0]);
        Christoffel gam{};
        for (std::size_t i = 1; i < 4; ++i) {
            gam[0][i][i] = H * a * a;                 // Gamma^0_{ij} = a adot delta_ij
            gam[i][0][i] = gam[i][i][0] = H;          // Gamma^i_{0j} = (adot/a) delta^i_j
        }
        return gam;
    });
    m.set_riemann([a_of, H](const Vec4& x) {
        const double a = a_of(x[0]);
        const double a2 = a * a;
        Riemann r{};
        for (std::size_t i = 1; i < 4; ++i) {
            r[0][i][0][i] = H * H * a2;   // R^0_{i0j} = a addot delta_ij
            r[0][i][i][0] = -H * H * a2;
            r[i][0][0][i] = H * H;        // R^i_{00j} = (addot/a) delta^i_j
            r[i][0][i][0] = -H * H;
            for (std::size_t j = 1; j < 4; ++j) {
                if (i == j) continue;
                r[i][j][i][j] = H * H * a2;   // R^i_{jkl} = adot^2 (d^i_k d_jl - d^i_l d_jk)
                r[i][j][j][i] = -H * H * a2;
            }
        }
        return r;
    });
    return m;
}

QFieldModel::QFieldModel(ScalarFn q, double fd_step) : q_(std::move(q)) {
    if (!(fd_step > 0.0)) throw ContractError("QFieldModel: fd_step must be positive");
    auto qq = q_;
    grad_ = [qq, fd_step](const Vec4& x) {
        Vec4 g{};
        for (std::size_t k = 0; k < 4; ++k)
            g[k] = (qq(shifted(x, k, fd_step)) - qq(shifted(x, k, -fd_step))) / (2.0 * fd_step);
        return g;
    };
}

QFieldModel QFieldModel::zero() {
    return QFieldModel([](const Vec4&) { return 0.0; }, [](const Vec4&) { return Vec4{}; });
}

QFieldModel QFieldModel::gaussian_bump(double q0, double width) {
    const double w2 = width * width;
    return QFieldModel(
        [q0, w2](const Vec4& x) { return q0 * std::exp(-x[1] * x[1] / (2.0 * w2)); },
        [q0, w2](const Vec4& x) {
            Vec4 g{};
            g[1] = -q0 * x[1] / w2 * std::exp(-x[1] * x[1] / (2.0 * w2));
            return g;
        });
}

double dot(const Mat4& g, const Vec4& a, const Vec4& b) {
    double s = 0.0;
    for (std::size_t mu = 0; mu < 4; ++mu)
        for (std::size_t nu = 0; nu < 4; ++nu) s += g[mu][nu] * a[mu] * b[nu];
    return s;
}

void normalize_u0(const Mat4& g, Vec4& u) {
    // g00 (u0)^2 + 2 g0i u0 ui + gij ui uj = 1
    const double qa = g[0][0];
    double qb = 0.0, qc = -1.0;
    for (std::size_t i = 1; i < 4; ++i) qb += 2.0 * g[0][i] * u[i];
    for (std::size_t i = 1; i < 4; ++i)
        for (std::size_t j = 1; j < 4; ++j) qc += g[i][j] * u[i] * u[j];
    const double disc = qb * qb - 4.0 * qa * qc;
    if (disc < 0.0) throw NumericalError("normalize_u0: no timelike solution");
    u[0] = (-qb + std::sqrt(disc)) / (2.0 * qa);
}

double quantum_mass(double q_val, double m) {
    if (!(1.0 + q_val > 0.0))
        throw TachyonicError("quantum_mass: 1 + Q <= 0 (tachyonic regime)");
    return m * std::sqrt(1.0 + q_val);
}

Vec4 bohmian_acceleration(const Vec4& x, const Vec4& u, const QFieldModel& qf,
                          const MetricModel& metric, AccelForm form) {
    const double q = qf.q(x);
    if (!(1.0 + q > 0.0))
        throw TachyonicError("bohmian_acceleration: 1 + Q <= 0 (tachyonic regime)");

    Vec4 f = qf.grad(x);  // d_mu Q
    if (form == AccelForm::exact_log)
        for (auto& c : f) c /= (1.0 + q);  // d_mu ln(1 + Q)

    const Mat4 ginv = metric.inverse_metric(x);
    double u_dot_f = 0.0;
    for (std::size_t nu = 0; nu < 4; ++nu) u_dot_f += u[nu] * f[nu];

    Vec4 a{};
    for (std::size_t mu = 0; mu < 4; ++mu) {
        double up = 0.0;
        for (std::size_t nu = 0; nu < 4; ++nu) up += ginv[mu][nu] * f[nu];
        a[mu] = -0.5 * u[mu] * u_dot_f + 0.5 * up;
    }
    return a;
}

void validate_state(const RelCongruenceState& s, const MetricModel& metric, double tol) {
    const Mat4 g = metric.metric(s.x);
    const double uu = dot(g, s.u, s.u);
    const double ue = dot(g, s.u, s.eta);
    if (std::abs(uu - 1.0) > tol) {
        std::ostringstream os;
        os << "RelCongruenceState: u.u = " << uu << " violates unit normalization";
        throw ContractError(os.str());
    }
    if (std::abs(ue) > tol) {
        std::ostringstream os;
        os << "RelCongruenceState: u.eta = " << ue << " violates orthogonality";
        throw ContractError(os.str());
    }
}

Vec4 deviation_rhs(const RelCongruenceState& s, const MetricModel& metric, const QFieldModel& qf,
                   AccelForm form, double eps_displacement) {
    double eta_mag = 0.0;
    for (double c : s.eta) eta_mag = std::max(eta_mag, std::abs(c));
    if (eta_mag == 0.0) return Vec4{};
    const double eps = eps_displacement / eta_mag;

    const Christoffel gam = metric.christoffel(s.x);

    // Parallel transport u to x +/- eps eta: du^mu = -+ eps Gamma^mu_{al be} eta^al u^be.
    Vec4 xp = s.x, xm = s.x, up = s.u, um = s.u;
    for (std::size_t mu = 0; mu < 4; ++mu) {
        xp[mu] += eps * s.eta[mu];
        xm[mu] -= eps * s.eta[mu];
        double corr = 0.0;
        for (std::size_t al = 0; al < 4; ++al)
            for (std::size_t be = 0; be < 4; ++be)
                corr += gam[mu][al][be] * s.eta[al] * s.u[be];
        up[mu] -= eps * corr;
        um[mu] += eps * corr;
    }

    const Vec4 ap = bohmian_acceleration(xp, up, qf, metric, form);
    const Vec4 am = bohmian_acceleration(xm, um, qf, metric, form);
    const Vec4 a0 = bohmian_acceleration(s.x, s.u, qf, metric, form);

    const Riemann riem = metric.riemann(s.x);

    Vec4 rhs{};
    for (std::size_t mu = 0; mu < 4; ++mu) {
        // eta^lam nabla_lam a^mu = FD directional derivative + Gamma eta a
        double v = (ap[mu] - am[mu]) / (2.0 * eps);
        for (std::size_t lam = 0; lam < 4; ++lam)
            for (std::size_t nu = 0; nu < 4; ++nu)
                v += gam[mu][lam][nu] * s.eta[lam] * a0[nu];
        // + R^mu_{rho lam nu} u^rho u^lam eta^nu
        for (std::size_t rho = 0; rho < 4; ++rho)
            for (std::size_t lam = 0; lam < 4; ++lam)
                for (std::size_t nu = 0; nu < 4; ++nu)
                    v += riem[mu][rho][lam][nu] * s.u[rho] * s.u[lam] * s.eta[nu];
        rhs[mu] = v;
    }
    return rhs;
}

namespace {

struct StateDeriv {
    Vec4 dx, du, deta, dv;
};

StateDeriv derivative(const RelCongruenceState& s, const MetricModel& metric,
                      const QFieldModel& qf, AccelForm form, double eps_displacement) {
    const Christoffel gam = metric.christoffel(s.x);
    const Vec4 a = bohmian_acceleration(s.x, s.u, qf, metric, form);
    const Vec4 r = deviation_rhs(s, metric, qf, form, eps_displacement);

    StateDeriv d;
    d.dx = s.u;
    for (std::size_t mu = 0; mu < 4; ++mu) {
        double guu = 0.0, gue = 0.0, guv = 0.0;
        for (std::size_t al = 0; al < 4; ++al)
            for (std::size_t be = 0; be < 4; ++be) {
                guu += gam[mu][al][be] * s.u[al] * s.u[be];
                gue += gam[mu][al][be] * s.u[al] * s.eta[be];
                guv += gam[mu][al][be] * s.u[al] * s.v[be];
            }
        d.du[mu] = a[mu] - guu;
        d.deta[mu] = s.v[mu] - gue;
        d.dv[mu] = r[mu] - guv;
    }
    return d;
}

RelCongruenceState advanced(const RelCongruenceState& s, const StateDeriv& d, double h) {
    RelCongruenceState out = s;
    for (std::size_t mu = 0; mu < 4; ++mu) {
        out.x[mu] += h * d.dx[mu];
        out.u[mu] += h * d.du[mu];
        out.eta[mu] += h * d.deta[mu];
        out.v[mu] += h * d.dv[mu];
    }
    out.tau += h;
    return out;
}

}  // namespace

CongruenceSeries integrate_congruence(const RelCongruenceState& s0, const MetricModel& metric,
                                      const QFieldModel& qf, double dtau, double tau_end,
                                      AccelForm form, double eps_displacement) {
    if (!(dtau > 0.0) || !(tau_end >= 0.0))
        throw ContractError("integrate_congruence: need dtau > 0 and tau_end >= 0");
    validate_state(s0, metric);

    const auto n_steps = static_cast<std::size_t>(std::llround(tau_end / dtau));
    CongruenceSeries series;
    series.states.reserve(n_steps + 1);
    series.states.push_back(s0);

    RelCongruenceState s = s0;
    double eta_scale = 1.0;
    for (double c : s.eta) eta_scale = std::max(eta_scale, std::abs(c));

    for (std::size_t k = 0; k < n_steps; ++k) {
        const StateDeriv k1 = derivative(s, metric, qf, form, eps_displacement);
        const StateDeriv k2 =
            derivative(advanced(s, k1, 0.5 * dtau), metric, qf, form, eps_displacement);
        const StateDeriv k3 =
            derivative(advanced(s, k2, 0.5 * dtau), metric, qf, form, eps_displacement);
        const StateDeriv k4 = derivative(advanced(s, k3, dtau), metric, qf, form, eps_displacement);

        for (std::size_t mu = 0; mu < 4; ++mu) {
            s.x[mu] += dtau / 6.0 * (k1.dx[mu] + 2.0 * k2.dx[mu] + 2.0 * k3.dx[mu] + k4.dx[mu]);
            s.u[mu] += dtau / 6.0 * (k1.du[mu] + 2.0 * k2.du[mu] + 2.0 * k3.du[mu] + k4.du[mu]);
            s.eta[mu] +=
                dtau / 6.0 * (k1.deta[mu] + 2.0 * k2.deta[mu] + 2.0 * k3.deta[mu] + k4.deta[mu]);
            s.v[mu] += dtau / 6.0 * (k1.dv[mu] + 2.0 * k2.dv[mu] + 2.0 * k3.dv[mu] + k4.dv[mu]);
        }
        s.tau += dtau;

        const Mat4 g = metric.metric(s.x);
        const double uu_drift = std::abs(dot(g, s.u, s.u) - 1.0);
        const double ueta_drift = std::abs(dot(g, s.u, s.eta)) / eta_scale;
        series.max_uu_drift = std::max(series.max_uu_drift, uu_drift);
        series.max_ueta_drift = std::max(series.max_ueta_drift, ueta_drift);
        if (uu_drift > 1e-6 || ueta_drift > 1e-6) {
            std::ostringstream os;
            os << "integrate_congruence: constraint drift (u.u-1 = " << uu_drift
               << ", u.eta = " << ueta_drift << ") exceeds 1e-6 at tau = " << s.tau;
            throw NumericalError(os.str());
        }
        series.states.push_back(s);
    }
    return series;
}

}  // namespace snbohm::rel
