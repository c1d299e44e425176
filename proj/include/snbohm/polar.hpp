#pragma once

#include "snbohm/grid.hpp"

namespace snbohm {

// Polar decomposition psi = R exp(i S / hbar).  S is the unwrapped action,
// continuous along the grid; where R falls below the amplitude floor the phase
// is carried over from the nearest valid neighbor and flagged.
struct PolarFields {
    RealField R;
    RealField S;
    RealField rho;                     // R^2
    std::vector<unsigned char> valid;  // 1 where R > floor (phase well defined)
    double amplitude_floor = 0.0;
};

// Default floor: 1e-8 * max R (Q and S have R in the denominator).
inline constexpr double default_floor_fraction = 1e-8;

PolarFields polar_decompose(const ComplexField& psi, double hbar = 1.0,
                            double floor_fraction = default_floor_fraction);

ComplexField recompose(const PolarFields& pf, double hbar = 1.0);

}  // namespace snbohm
