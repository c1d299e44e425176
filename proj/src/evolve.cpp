#include "snbohm/evolve.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace snbohm::evolve {

namespace {

using cplx = std::complex<double>;

// Thomas solve of a tridiagonal system with constant off-diagonals.
// diag and rhs are overwritten.  Diagonal dominance holds for the CN matrix.
void solve_tridiagonal(std::vector<cplx>& diag, cplx off, std::vector<cplx>& rhs) {
    const std::size_t n = diag.size();
    for (std::size_t i = 1; i < n; ++i) {
        const cplx w = off / diag[i - 1];
        diag[i] -= w * off;
        rhs[i] -= w * rhs[i - 1];
    }
    rhs[n - 1] /= diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - off * rhs[i + 1]) / diag[i];
}

// Cached LU of the constant-coefficient CN matrix (gravity off: the system is
// identical every step).
struct TriFactor {
    std::vector<cplx> w;         // elimination multipliers
    std::vector<cplx> inv_diag;  // reciprocals of the pivots
    cplx off{};

    void factorize(cplx diag_value, cplx off_value, std::size_t n) {
        off = off_value;
        w.assign(n, cplx{});
        inv_diag.assign(n, cplx{});
        cplx d = diag_value;
        inv_diag[0] = 1.0 / d;
        for (std::size_t i = 1; i < n; ++i) {
            w[i] = off * inv_diag[i - 1];
            d = diag_value - w[i] * off;
            inv_diag[i] = 1.0 / d;
        }
    }

    void solve(std::vector<cplx>& rhs) const {
        const std::size_t n = rhs.size();
        for (std::size_t i = 1; i < n; ++i) rhs[i] -= w[i] * rhs[i - 1];
        rhs[n - 1] *= inv_diag[n - 1];
        for (std::size_t i = n - 1; i-- > 0;)
            rhs[i] = (rhs[i] - off * rhs[i + 1]) * inv_diag[i];
    }
};

// Crank-Nicolson engine.  line1d works on psi directly; radial3d works on
// u = r psi so the kinetic operator stays symmetric and the step is exactly
// unitary in the physical norm.  Dirichlet boundaries; interior unknowns only.
class CnEngine {
public:
    CnEngine(const ComplexField& psi0, const Particle& p,
             const gravity::GravityParams& gparams, bool gravity_on, double hbar)
        : grid_(psi0.grid()),
          p_(p),
          gparams_(gparams),
          gravity_on_(gravity_on),
          hbar_(hbar),
          radial_(psi0.grid().geometry() == Geometry::radial3d) {
        const std::size_t n = grid_.n();
        state_.assign(n, cplx(0.0, 0.0));
        if (radial_) {
            for (std::size_t i = 0; i < n; ++i) state_[i] = grid_.x(i) * psi0[i];
        } else {
            state_ = psi0.values();
        }
        state_.front() = 0.0;
        state_.back() = 0.0;
        norm0_ = discrete_norm2(state_);
        if (!(norm0_ > 0.0)) throw ContractError("evolve: zero-norm initial state");
    }

    // Density on the grid nodes from the current interior state.
    std::vector<double> density(const std::vector<cplx>& s) const {
        const std::size_t n = grid_.n();
        std::vector<double> rho(n, 0.0);
        if (radial_) {
            for (std::size_t i = 1; i < n; ++i) {
                const double r = grid_.x(i);
                rho[i] = std::norm(s[i]) / (r * r);
            }
            // even-function extrapolation to r = 0 (exact through r^4)
            rho[0] = 1.5 * rho[1] - 0.6 * rho[2] + 0.1 * rho[3];
            if (rho[0] < 0.0) rho[0] = 0.0;
        } else {
            for (std::size_t i = 0; i < n; ++i) rho[i] = std::norm(s[i]);
        }
        return rho;
    }

    std::vector<double> potential(const std::vector<double>& rho) const {
        if (!gravity_on_) return {};
        RealField rho_f(grid_, rho);
        RealField u = gravity::self_energy_field(rho_f, p_, gparams_);
        return u.values();
    }

    void advance(double dt, double picard_tol, std::size_t max_iters) {
        const std::size_t n = grid_.n();
        const double h = grid_.spacing();
        const double kappa = hbar_ * hbar_ / (2.0 * p_.mass);
        const cplx lambda = cplx(0.0, dt / (2.0 * hbar_));
        const cplx off = lambda * (-kappa / (h * h));

        if (candidate_.size() != n) {
            candidate_.assign(n, cplx{});
            diag_.assign(n - 2, cplx{});
            rhs_.assign(n - 2, cplx{});
        }
        candidate_ = state_;

        std::vector<double> rho_old, rho_mid;
        if (gravity_on_) {
            rho_old = density(state_);
            rho_mid = rho_old;
        }

        double change = 0.0;
        bool converged = false;
        for (std::size_t iter = 0; iter < max_iters; ++iter) {
            const std::vector<double> ug = potential(rho_mid);

            // Assemble (1 + lambda H) x = (1 - lambda H) state for interior
            // nodes 1..n-2.
            if (gravity_on_) {
                for (std::size_t i = 1; i + 1 < n; ++i) {
                    const cplx hdiag = lambda * (2.0 * kappa / (h * h) + ug[i]);
                    diag_[i - 1] = 1.0 + hdiag;
                    rhs_[i - 1] = (1.0 - hdiag) * state_[i] - off * (state_[i - 1] + state_[i + 1]);
                }
            } else {
                const cplx hdiag = lambda * (2.0 * kappa / (h * h));
                const cplx one_minus = 1.0 - hdiag;
                for (std::size_t i = 1; i + 1 < n; ++i)
                    rhs_[i - 1] = one_minus * state_[i] - off * (state_[i - 1] + state_[i + 1]);
                if (factor_dt_ != dt) {
                    factor_.factorize(1.0 + hdiag, off, n - 2);
                    factor_dt_ = dt;
                }
            }
            if (gravity_on_)
                solve_tridiagonal(diag_, off, rhs_);
            else
                factor_.solve(rhs_);

            double diff2 = 0.0;
            for (std::size_t i = 1; i + 1 < n; ++i) {
                diff2 += std::norm(rhs_[i - 1] - candidate_[i]);
                candidate_[i] = rhs_[i - 1];
            }
            change = std::sqrt(diff2 / norm0_);

            if (!gravity_on_ || change < picard_tol) {
                converged = true;
                break;
            }
            const std::vector<double> rho_new = density(candidate_);
            for (std::size_t i = 0; i < n; ++i) rho_mid[i] = 0.5 * (rho_old[i] + rho_new[i]);
        }
        if (!converged) {
            std::ostringstream os;
            os << "evolve: Picard iteration did not converge (last relative change " << change
               << ", tol " << picard_tol << ")";
            throw NumericalError(os.str());
        }
        state_.swap(candidate_);

        const double drift = std::abs(std::sqrt(discrete_norm2(state_) / norm0_) - 1.0);
        if (drift > 1e-6) {
            std::ostringstream os;
            os << "evolve: norm drift " << drift << " exceeds 1e-6";
            throw NumericalError(os.str());
        }
    }

    ComplexField to_field() const {
        const std::size_t n = grid_.n();
        std::vector<cplx> psi(n);
        if (radial_) {
            for (std::size_t i = 1; i < n; ++i) psi[i] = state_[i] / grid_.x(i);
            psi[0] = 1.5 * psi[1] - 0.6 * psi[2] + 0.1 * psi[3];  // even extrapolation
        } else {
            psi = state_;
        }
        return ComplexField(grid_, std::move(psi), /*normalize=*/false);
    }

    double physical_norm() const {
        // trapezoid with zero boundary values reduces to the plain sum in both
        // representations
        double s = 0.0;
        const double h = grid_.spacing();
        if (radial_) {
            for (const auto& u : state_) s += std::norm(u);
            return std::sqrt(4.0 * std::numbers::pi * s * h);
        }
        for (const auto& v : state_) s += std::norm(v);
        return std::sqrt(s * h);
    }

    double width() const {
        const std::size_t n = grid_.n();
        if (radial_) {
            double r2 = 0.0, m0 = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double r = grid_.x(i);
                r2 += std::norm(state_[i]) * r * r;
                m0 += std::norm(state_[i]);
            }
            return std::sqrt(r2 / m0 / 3.0);
        }
        double m0 = 0.0, m1 = 0.0, m2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double x = grid_.x(i);
            const double w = std::norm(state_[i]);
            m0 += w;
            m1 += w * x;
            m2 += w * x * x;
        }
        const double mean = m1 / m0;
        return std::sqrt(m2 / m0 - mean * mean);
    }

private:
    static double discrete_norm2(const std::vector<cplx>& v) {
        double s = 0.0;
        for (const auto& z : v) s += std::norm(z);
        return s;
    }

    Grid grid_;
    Particle p_;
    gravity::GravityParams gparams_;
    bool gravity_on_;
    double hbar_;
    bool radial_;
    std::vector<cplx> state_;
    std::vector<cplx> candidate_;
    std::vector<cplx> diag_;
    std::vector<cplx> rhs_;
    TriFactor factor_;
    double factor_dt_ = -1.0;
    double norm0_ = 0.0;
};

}  // namespace

double default_dt(const Grid& grid, const Particle& p, double hbar) {
    const double h = grid.spacing();
    return 0.1 * p.mass * h * h / hbar;
}

ComplexField step(const ComplexField& psi, const Particle& p, double dt, bool gravity_on,
                  const gravity::GravityParams& gparams, double hbar, double picard_tol,
                  std::size_t picard_max_iters) {
    CnEngine engine(psi, p, gparams, gravity_on, hbar);
    engine.advance(dt, picard_tol, picard_max_iters);
    return engine.to_field();
}

EvolutionRecord evolve(const ComplexField& psi0, const Particle& p, const EvolveConfig& config,
                       const gravity::GravityParams& gparams, double hbar) {
    config.validate();
    const double dt = (config.dt > 0.0) ? config.dt : default_dt(psi0.grid(), p, hbar);
    const auto n_steps = static_cast<std::size_t>(std::llround(config.t_end / dt));

    CnEngine engine(psi0, p, gparams, config.gravity_on, hbar);
    EvolutionRecord rec;

    auto record = [&](double t) {
        rec.times.push_back(t);
        rec.width.push_back(engine.width());
        rec.norm.push_back(engine.physical_norm());
        ComplexField psi = engine.to_field();
        // near-zero floor: the energy functionals are rho-weighted, so tail
        // noise is harmless, and wide solution grids must not be rejected
        PolarFields pf = polar_decompose(psi, hbar, 1e-30);
        rec.mean_q.push_back(quantum::mean_quantum_potential(pf, p, hbar));
        rec.mean_ug.push_back(config.gravity_on
                                  ? gravity::mean_self_energy(pf.rho, p, gparams)
                                  : 0.0);
        if (config.store_snapshots) {
            rec.snapshot_times.push_back(t);
            rec.snapshots.push_back(std::move(psi));
        }
    };

    record(0.0);
    for (std::size_t k = 1; k <= n_steps; ++k) {
        engine.advance(dt, config.picard_tol, config.picard_max_iters);
        if (k % config.record_every == 0 || k == n_steps)
            record(dt * static_cast<double>(k));
    }
    rec.psi_final = engine.to_field();
    return rec;
}

double packet_width(const RealField& rho) {
    if (rho.grid().geometry() == Geometry::radial3d) {
        RealField r2rho(rho.grid());
        for (std::size_t i = 0; i < rho.size(); ++i) {
            const double r = rho.grid().x(i);
            r2rho[i] = r * r * rho[i];
        }
        return std::sqrt(integrate(r2rho) / integrate(rho) / 3.0);
    }
    RealField xrho(rho.grid()), x2rho(rho.grid());
    for (std::size_t i = 0; i < rho.size(); ++i) {
        const double x = rho.grid().x(i);
        xrho[i] = x * rho[i];
        x2rho[i] = x * x * rho[i];
    }
    const double m0 = integrate(rho);
    const double mean = integrate(xrho) / m0;
    return std::sqrt(integrate(x2rho) / m0 - mean * mean);
}

}  // namespace snbohm::evolve
