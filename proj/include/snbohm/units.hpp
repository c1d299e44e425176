#pragma once

#include <string>

#include "snbohm/errors.hpp"

namespace snbohm {

// CODATA 2018 values.
namespace constants {
inline constexpr double hbar_si = 1.054571817e-34;  // J s
inline constexpr double G_si = 6.67430e-11;         // m^3 kg^-1 s^-2
}  // namespace constants

enum class UnitMode { natural, si };

enum class Dimension { length, mass, time, energy };

// Unit system with hbar = G = 1 in natural mode.  Fixing hbar and G leaves one
// free scale; we take the mass unit M0 (in kg).  The derived length unit is
// then hbar^2/(G M0^3) -- the packet-width scale of a unit mass -- which keeps
// the quantities of interest O(1) on the grid.
class UnitSystem {
public:
    static UnitSystem natural(double mass_unit_kg = 1.0e-15);
    static UnitSystem si();

    UnitMode mode() const { return mode_; }
    double hbar() const { return hbar_; }
    double G() const { return G_; }

    // Scale factors: value_si = value_internal * unit(dim).
    double unit(Dimension dim) const;
    double to_si(double value, Dimension dim) const { return value * unit(dim); }
    double from_si(double value_si, Dimension dim) const { return value_si / unit(dim); }

    std::string describe() const;

private:
    UnitSystem(UnitMode mode, double hbar, double G, double mass_unit_kg);

    UnitMode mode_;
    double hbar_;
    double G_;
    double mass_kg_;     // kg per internal mass unit
    double length_m_;    // m per internal length unit
    double time_s_;      // s per internal time unit
};

// Point particle.  Mass in the active unit system.
struct Particle {
    double mass = 1.0;

    explicit Particle(double m) : mass(m) {
        if (!(m > 0.0)) throw ContractError("Particle: mass must be positive");
    }
};

}  // namespace snbohm
