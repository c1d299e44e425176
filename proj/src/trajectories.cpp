#include "snbohm/trajectories.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace snbohm::traj {

SnapshotProvider::SnapshotProvider(std::vector<double> times, std::vector<PolarFields> snapshots)
    : times_(std::move(times)), snapshots_(std::move(snapshots)) {
    if (times_.size() != snapshots_.size() || times_.empty())
        throw ContractError("SnapshotProvider: need matching, non-empty times and snapshots");
    for (std::size_t i = 1; i < times_.size(); ++i)
        if (!(times_[i] > times_[i - 1]))
            throw ContractError("SnapshotProvider: times must be strictly increasing");
    grid_ = snapshots_.front().R.grid();
}

PolarFields SnapshotProvider::fields(double t) const {
    if (t <= times_.front()) return snapshots_.front();
    if (t >= times_.back()) return snapshots_.back();
    const auto it = std::upper_bound(times_.begin(), times_.end(), t);
    const std::size_t j = static_cast<std::size_t>(it - times_.begin());
    const double w = (t - times_[j - 1]) / (times_[j] - times_[j - 1]);

    const PolarFields& a = snapshots_[j - 1];
    const PolarFields& b = snapshots_[j];
    PolarFields out = a;
    for (std::size_t i = 0; i < out.R.size(); ++i) {
        out.R[i] = (1.0 - w) * a.R[i] + w * b.R[i];
        out.S[i] = (1.0 - w) * a.S[i] + w * b.S[i];
        out.rho[i] = out.R[i] * out.R[i];
        out.valid[i] = a.valid[i] && b.valid[i];
    }
    return out;
}

VelocityField velocity_field(const PolarFields& pf, const Particle& p) {
    const Grid& g = pf.S.grid();
    const std::size_t n = g.n();
    RealField grad_s = gradient(pf.S);

    VelocityField out;
    out.v = RealField(g);
    out.extrapolated.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) out.v[i] = grad_s[i] / p.mass;

    // The one-sided difference at phase-invalid points mixes carried-over S
    // values; replace with the nearest valid value and flag.
    std::ptrdiff_t last = -1;
    for (std::size_t i = 0; i < n; ++i) {
        const bool interior_ok = pf.valid[i] &&
                                 (i == 0 || pf.valid[i - 1]) &&
                                 (i + 1 == n || pf.valid[i + 1]);
        if (interior_ok) {
            last = static_cast<std::ptrdiff_t>(i);
        } else {
            std::size_t j = i;
            while (j < n) {
                const bool ok = pf.valid[j] && (j == 0 || pf.valid[j - 1]) &&
                                (j + 1 == n || pf.valid[j + 1]);
                if (ok) break;
                ++j;
            }
            if (last >= 0)
                out.v[i] = out.v[static_cast<std::size_t>(last)];
            else if (j < n)
                out.v[i] = out.v[j];
            out.extrapolated[i] = 1;
        }
    }
    return out;
}

std::vector<double> sample_initial(const RealField& rho0, std::size_t K) {
    if (K < 2) throw ContractError("sample_initial: K must be >= 2");
    const Grid& g = rho0.grid();
    std::vector<double> cdf = cumulative_trapezoid(rho0);
    const double total = cdf.back();
    if (!(total > 0.0)) throw ContractError("sample_initial: rho0 integrates to zero");
    for (auto& c : cdf) c /= total;

    std::vector<double> xs(K);
    std::size_t j = 0;
    for (std::size_t k = 0; k < K; ++k) {
        const double q = (static_cast<double>(k) + 0.5) / static_cast<double>(K);
        while (j + 1 < cdf.size() && cdf[j + 1] < q) ++j;
        const double c0 = cdf[j], c1 = cdf[j + 1];
        const double w = (c1 > c0) ? (q - c0) / (c1 - c0) : 0.0;
        xs[k] = g.x(j) + w * g.spacing();
    }
    for (std::size_t k = 1; k < K; ++k)
        if (!(xs[k] > xs[k - 1]))
            throw NumericalError("sample_initial: quantiles not strictly increasing");
    return xs;
}

TrajectoryEnsemble integrate_ensemble(const std::vector<double>& x0s,
                                      const FieldProvider& provider, const Particle& p,
                                      double dt, double t_end) {
    if (x0s.empty()) throw ContractError("integrate_ensemble: empty ensemble");
    if (!(dt > 0.0) || !(t_end >= 0.0))
        throw ContractError("integrate_ensemble: need dt > 0 and t_end >= 0");

    const Grid& g = provider.grid();
    const auto n_steps = static_cast<std::size_t>(std::llround(t_end / dt));
    const std::size_t K = x0s.size();

    TrajectoryEnsemble ens;
    ens.x0 = x0s;
    ens.times.resize(n_steps + 1);
    ens.positions.assign(K, std::vector<double>(n_steps + 1, 0.0));
    ens.exited.assign(K, 0);
    ens.exit_time.assign(K, 0.0);

    auto velocity_at = [&](double t) { return velocity_field(provider.fields(t), p).v; };

    RealField v0 = velocity_at(0.0);
    for (std::size_t k = 0; k < K; ++k) ens.positions[k][0] = x0s[k];
    ens.times[0] = 0.0;

    for (std::size_t s = 0; s < n_steps; ++s) {
        const double t = dt * static_cast<double>(s);
        const RealField vh = velocity_at(t + 0.5 * dt);
        const RealField v1 = velocity_at(t + dt);

        for (std::size_t k = 0; k < K; ++k) {
            if (ens.exited[k]) {
                ens.positions[k][s + 1] = ens.positions[k][s];
                continue;
            }
            const double x = ens.positions[k][s];
            const double k1 = interp_linear(v0, x);
            const double k2 = interp_linear(vh, x + 0.5 * dt * k1);
            const double k3 = interp_linear(vh, x + 0.5 * dt * k2);
            const double k4 = interp_linear(v1, x + dt * k3);
            const double x_new = x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            if (x_new < g.x_min() || x_new > g.x_max()) {
                ens.exited[k] = 1;
                ens.exit_time[k] = t + dt;
                ens.positions[k][s + 1] = x;
            } else {
                ens.positions[k][s + 1] = x_new;
            }
        }
        ens.times[s + 1] = t + dt;
        v0 = v1;
    }
    return ens;
}

NonCrossingReport check_non_crossing(const TrajectoryEnsemble& ens) {
    NonCrossingReport rep;
    const std::size_t K = ens.positions.size();
    if (K < 2) return rep;  // vacuously true
    for (std::size_t i = 0; i < ens.times.size(); ++i) {
        for (std::size_t k = 0; k + 1 < K; ++k) {
            if (ens.exited[k] || ens.exited[k + 1]) continue;
            if (!(ens.positions[k][i] < ens.positions[k + 1][i])) {
                rep.ok = false;
                rep.pair_lo = k;
                rep.time = ens.times[i];
                return rep;
            }
        }
    }
    return rep;
}

LoopIntegral phase_loop_integral(const PolarFields& pf, const std::vector<std::size_t>& loop,
                                 double hbar) {
    LoopIntegral out;
    out.planck = 2.0 * std::numbers::pi * hbar;
    if (loop.size() < 2) return out;  // degenerate loop

    const double half = std::numbers::pi * hbar;
    auto wrap = [&](double ds) {
        while (ds > half) ds -= out.planck;
        while (ds <= -half) ds += out.planck;
        return ds;
    };

    double total = 0.0;
    for (std::size_t i = 0; i < loop.size(); ++i) {
        const std::size_t a = loop[i];
        const std::size_t b = loop[(i + 1) % loop.size()];
        if (a >= pf.S.size() || b >= pf.S.size())
            throw ContractError("phase_loop_integral: loop index out of range");
        if (!pf.valid[a] || !pf.valid[b])
            throw ContractError("phase_loop_integral: phase invalid on the loop");
        total += wrap(pf.S[b] - pf.S[a]);
    }
    out.value = total;
    out.winding = std::lround(total / out.planck);
    return out;
}

}  // namespace snbohm::traj
