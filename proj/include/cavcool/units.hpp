#pragma once

#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cavcool {

// Base class of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UnknownUnitPair : public Error {
public:
    using Error::Error;
};

namespace constants {

// CODATA 2018. The SI redefinition makes h, c, k_B and e exact.
inline constexpr double pi = std::numbers::pi;
inline constexpr double h = 6.62607015e-34;            // J s
inline constexpr double hbar = h / (2.0 * pi);         // J s
inline constexpr double c = 299792458.0;               // m/s
inline constexpr double c_cm = c * 100.0;              // cm/s
inline constexpr double k_B = 1.380649e-23;            // J/K
inline constexpr double e = 1.602176634e-19;           // C
inline constexpr double m_e = 9.1093837015e-31;        // kg
inline constexpr double a0 = 5.29177210903e-11;        // m
inline constexpr double amu = 1.66053906660e-27;       // kg
inline constexpr double hartree = 4.3597447222071e-18; // J
inline constexpr double epsilon0 = 8.8541878128e-12;   // F/m

// Atomic unit of polarizability e^2 a0^2 / E_h, in C m^2 / V.
inline constexpr double au_polarizability = e * e * a0 * a0 / hartree;
// Atomic unit of electric dipole e a0, in C m.
inline constexpr double au_dipole = e * a0;
inline constexpr double debye = 1e-21 / c;

// hbar^2 / (2 amu) expressed in cm^-1 A^2 (divide by the mass in amu).
inline constexpr double kinetic_cm1_A2 = hbar * hbar / (2.0 * amu) / (h * c_cm) * 1e20;

}  // namespace constants

enum class Dimension { energy, time, length, mass, polarizability, dipole, power };

// Energies, detunings and linewidths all share the energy dimension; the
// canonical internal representation is angular frequency in rad/s.
enum class Unit {
    wavenumber,         // cm^-1
    angular_frequency,  // rad/s (also used for rates, s^-1)
    hertz,
    kilohertz,
    megahertz,
    gigahertz,
    terahertz,
    electron_volt,
    hartree,
    joule,
    kelvin,  // as k_B T
    nanosecond,
    microsecond,
    millisecond,
    second,
    angstrom,
    nanometer,
    micrometer,
    centimeter,
    meter,
    amu,
    kilogram,
    au_polarizability,
    si_polarizability,  // C m^2 / V
    au_dipole,
    debye,
    si_dipole,  // C m
    watt,
    milliwatt,
};

struct Quantity {
    double value = 0.0;
    Unit unit = Unit::angular_frequency;
};

Dimension dimension_of(Unit u);
std::string_view unit_symbol(Unit u);

// Parses the unit annotations used in data files ("cm^-1", "rad/s", "GHz",
// "A", "amu", "au", ...). Throws UnknownUnitPair for unrecognised symbols.
Unit parse_unit(std::string_view symbol);

// Exact linear conversion. Throws UnknownUnitPair when the dimensions differ.
Quantity convert(Quantity q, Unit target);
double convert(double value, Unit from, Unit to);

inline constexpr double wavenumber_to_rad_s(double cm1) { return 2.0 * constants::pi * constants::c_cm * cm1; }
inline constexpr double rad_s_to_wavenumber(double w) { return w / (2.0 * constants::pi * constants::c_cm); }
inline constexpr double hz_to_rad_s(double f) { return 2.0 * constants::pi * f; }
inline constexpr double rad_s_to_hz(double w) { return w / (2.0 * constants::pi); }

}  // namespace cavcool
