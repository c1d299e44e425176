#pragma once

#include "snbohm/gravity.hpp"
#include "snbohm/polar.hpp"
#include "snbohm/quantum.hpp"

namespace snbohm::evolve {

struct EvolveConfig {
    double dt = 0.0;  // 0 -> default 0.1 m h^2 / hbar
    double t_end = 0.0;
    bool gravity_on = false;
    double picard_tol = 1e-10;
    std::size_t picard_max_iters = 25;
    std::size_t record_every = 1;
    bool store_snapshots = false;

    void validate() const {
        if (dt < 0.0) throw ContractError("EvolveConfig: dt must be >= 0");
        if (t_end < 0.0) throw ContractError("EvolveConfig: t_end must be >= 0");
        if (!(picard_tol > 0.0) || picard_tol > 1e-4)
            throw ContractError("EvolveConfig: picard_tol must lie in (0, 1e-4]");
        if (picard_max_iters < 1) throw ContractError("EvolveConfig: picard_max_iters >= 1");
        if (record_every < 1) throw ContractError("EvolveConfig: record_every >= 1");
    }
};

struct EvolutionRecord {
    std::vector<double> times;
    std::vector<double> width;    // rms width of rho (per-axis in radial3d)
    std::vector<double> norm;
    std::vector<double> mean_q;   // <Q>(t)
    std::vector<double> mean_ug;  // <U_g>(t); zero when gravity off
    std::vector<double> snapshot_times;
    std::vector<ComplexField> snapshots;
    ComplexField psi_final;
};

// One Crank-Nicolson step of i hbar dpsi/dt = [-(hbar^2/2m) lap + U_g[|psi|^2]] psi.
// The nonlinear potential is frozen per Picard sweep and iterated to relative
// change < picard_tol; the scheme is norm-preserving up to solver rounding.
ComplexField step(const ComplexField& psi, const Particle& p, double dt, bool gravity_on,
                  const gravity::GravityParams& gparams, double hbar = 1.0,
                  double picard_tol = 1e-10, std::size_t picard_max_iters = 25);

EvolutionRecord evolve(const ComplexField& psi0, const Particle& p, const EvolveConfig& config,
                       const gravity::GravityParams& gparams, double hbar = 1.0);

// rms width: line1d sqrt(<x^2> - <x>^2); radial3d per-axis sqrt(<r^2>/3).
double packet_width(const RealField& rho);

double default_dt(const Grid& grid, const Particle& p, double hbar = 1.0);

}  // namespace snbohm::evolve
