#include "cavcool/units.hpp"

#include <array>
#include <utility>

namespace cavcool {

namespace {

struct UnitInfo {
    Unit unit;
    Dimension dim;
    double factor;  // multiply to reach the dimension's base unit
    std::string_view symbol;
};

using namespace constants;

// Base units: rad/s, s, m, kg, au polarizability, au dipole, W.
constexpr std::array<UnitInfo, 29> kUnits{{
    {Unit::wavenumber, Dimension::energy, 2.0 * pi * c_cm, "cm^-1"},
    {Unit::angular_frequency, Dimension::energy, 1.0, "rad/s"},
    {Unit::hertz, Dimension::energy, 2.0 * pi, "Hz"},
    {Unit::kilohertz, Dimension::energy, 2.0 * pi * 1e3, "kHz"},
    {Unit::megahertz, Dimension::energy, 2.0 * pi * 1e6, "MHz"},
    {Unit::gigahertz, Dimension::energy, 2.0 * pi * 1e9, "GHz"},
    {Unit::terahertz, Dimension::energy, 2.0 * pi * 1e12, "THz"},
    {Unit::electron_volt, Dimension::energy, e / hbar, "eV"},
    {Unit::hartree, Dimension::energy, hartree / hbar, "Eh"},
    {Unit::joule, Dimension::energy, 1.0 / hbar, "J"},
    {Unit::kelvin, Dimension::energy, k_B / hbar, "K"},
    {Unit::nanosecond, Dimension::time, 1e-9, "ns"},
    {Unit::microsecond, Dimension::time, 1e-6, "us"},
    {Unit::millisecond, Dimension::time, 1e-3, "ms"},
    {Unit::second, Dimension::time, 1.0, "s"},
    {Unit::angstrom, Dimension::length, 1e-10, "A"},
    {Unit::nanometer, Dimension::length, 1e-9, "nm"},
    {Unit::micrometer, Dimension::length, 1e-6, "um"},
    {Unit::centimeter, Dimension::length, 1e-2, "cm"},
    {Unit::meter, Dimension::length, 1.0, "m"},
    {Unit::amu, Dimension::mass, amu, "amu"},
    {Unit::kilogram, Dimension::mass, 1.0, "kg"},
    {Unit::au_polarizability, Dimension::polarizability, 1.0, "au"},
    {Unit::si_polarizability, Dimension::polarizability, 1.0 / au_polarizability, "C m^2/V"},
    {Unit::au_dipole, Dimension::dipole, 1.0, "au_dipole"},
    {Unit::debye, Dimension::dipole, debye / au_dipole, "D"},
    {Unit::si_dipole, Dimension::dipole, 1.0 / au_dipole, "C m"},
    {Unit::watt, Dimension::power, 1.0, "W"},
    {Unit::milliwatt, Dimension::power, 1e-3, "mW"},
}};

const UnitInfo& info(Unit u) {
    for (const auto& i : kUnits)
        if (i.unit == u) return i;
    throw UnknownUnitPair("unit not registered");
}

constexpr std::array<std::pair<std::string_view, Unit>, 14> kAliases{{
    {"cm-1", Unit::wavenumber},
    {"1/cm", Unit::wavenumber},
    {"s^-1", Unit::angular_frequency},
    {"1/s", Unit::angular_frequency},
    {"rad s^-1", Unit::angular_frequency},
    {"Angstrom", Unit::angstrom},
    {"\xC3\x85", Unit::angstrom},  // Å
    {"\xC2\xB5m", Unit::micrometer},
    {"\xC2\xB5s", Unit::microsecond},
    {"u", Unit::amu},
    {"Da", Unit::amu},
    {"au_polarizability", Unit::au_polarizability},
    {"bohr^3", Unit::au_polarizability},
    {"Debye", Unit::debye},
}};

}  // namespace

Dimension dimension_of(Unit u) { return info(u).dim; }

std::string_view unit_symbol(Unit u) { return info(u).symbol; }

Unit parse_unit(std::string_view symbol) {
    for (const auto& i : kUnits)
        if (i.symbol == symbol) return i.unit;
    for (const auto& [alias, unit] : kAliases)
        if (alias == symbol) return unit;
    throw UnknownUnitPair("unknown unit symbol '" + std::string(symbol) + "'");
}

double convert(double value, Unit from, Unit to) {
    const auto& a = info(from);
    const auto& b = info(to);
    if (a.dim != b.dim)
        throw UnknownUnitPair("cannot convert " + std::string(a.symbol) + " to " + std::string(b.symbol));
    if (from == to) return value;
    return value * (a.factor / b.factor);
}

Quantity convert(Quantity q, Unit target) { return {convert(q.value, q.unit, target), target}; }

}  // namespace cavcool
