#include "snbohm/units.hpp"

#include <cmath>
#include <sstream>

namespace snbohm {

UnitSystem::UnitSystem(UnitMode mode, double hbar, double G, double mass_unit_kg)
    : mode_(mode), hbar_(hbar), G_(G), mass_kg_(mass_unit_kg) {
    if (!(hbar_ > 0.0) || !(G_ > 0.0)) throw ContractError("UnitSystem: hbar and G must be positive");
    if (!(mass_kg_ > 0.0)) throw ContractError("UnitSystem: mass unit must be positive");
    if (mode_ == UnitMode::si) {
        length_m_ = 1.0;
        time_s_ = 1.0;
        mass_kg_ = 1.0;
    } else {
        // hbar = G = 1 with mass unit M0 fixes L0 = hbar^2 / (G M0^3) and
        // T0 = M0 L0^2 / hbar.
        length_m_ = constants::hbar_si * constants::hbar_si /
                    (constants::G_si * mass_kg_ * mass_kg_ * mass_kg_);
        time_s_ = mass_kg_ * length_m_ * length_m_ / constants::hbar_si;
    }
}

UnitSystem UnitSystem::natural(double mass_unit_kg) {
    return UnitSystem(UnitMode::natural, 1.0, 1.0, mass_unit_kg);
}

UnitSystem UnitSystem::si() {
    return UnitSystem(UnitMode::si, constants::hbar_si, constants::G_si, 1.0);
}

double UnitSystem::unit(Dimension dim) const {
    switch (dim) {
        case Dimension::length: return length_m_;
        case Dimension::mass: return mass_kg_;
        case Dimension::time: return time_s_;
        case Dimension::energy: return mass_kg_ * length_m_ * length_m_ / (time_s_ * time_s_);
    }
    throw ContractError("UnitSystem::unit: unknown dimension");
}

std::string UnitSystem::describe() const {
    std::ostringstream os;
    if (mode_ == UnitMode::natural) {
        os << "natural (hbar=1, G=1, mass unit " << mass_kg_ << " kg)";
    } else {
        os << "SI (hbar=" << hbar_ << " J s, G=" << G_ << " m^3 kg^-1 s^-2)";
    }
    return os.str();
}

}  // namespace snbohm
