#pragma once

#include "snbohm/calculus.hpp"
#include "snbohm/units.hpp"

namespace snbohm::gravity {

// Sign convention for the gravitational potential phi of the probability
// distribution.  paper_positive: phi = +G m int rho/|x-x'| (so the balance
// condition grad Q = m grad phi holds literally); newtonian: the negative of
// that, with lap(phi) = 4 pi G m rho.  Always U_g = -m phi_paper = +m phi_newton.
enum class PhiConvention { paper_positive, newtonian };

struct GravityParams {
    double G = 1.0;
    double epsilon = 0.0;  // line1d kernel softening; must be > 0 on line1d
    PhiConvention sign_convention = PhiConvention::paper_positive;
};

// U_g(x) = -G m^2 int rho(x')/|x-x'| dmu'.  line1d uses the softened kernel
// 1/(|x-x'| + eps); radial3d is exact via the shell theorem (no softening).
RealField self_energy_field(const RealField& rho, const Particle& p, const GravityParams& params);

// phi in the requested sign convention.
RealField potential_field(const RealField& rho, const Particle& p, const GravityParams& params);

// <U_g> = int rho U_g dmu (the double integral).
double mean_self_energy(const RealField& rho, const Particle& p, const GravityParams& params);

}  // namespace snbohm::gravity
