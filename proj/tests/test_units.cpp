#include <catch_amalgamated.hpp>

#include "cavcool/units.hpp"

using namespace cavcool;
using Catch::Matchers::WithinRel;

TEST_CASE("wavenumber to angular frequency uses 2 pi c") {
    // 1 cm^-1 = 29.9792458 GHz
    REQUIRE_THAT(convert(1.0, Unit::wavenumber, Unit::gigahertz), WithinRel(29.9792458, 1e-14));
    REQUIRE_THAT(wavenumber_to_rad_s(1.0), WithinRel(2.0 * std::numbers::pi * 2.99792458e10, 1e-15));
    REQUIRE_THAT(rad_s_to_wavenumber(wavenumber_to_rad_s(3735.2)), WithinRel(3735.2, 1e-15));
}

TEST_CASE("energy conversions against hand-computed constants") {
    // 1 eV / h = 241.798924 THz
    REQUIRE_THAT(convert(1.0, Unit::electron_volt, Unit::terahertz), WithinRel(241.7989242, 1e-9));
    // 1 hartree = 219474.6313632 cm^-1
    REQUIRE_THAT(convert(1.0, Unit::hartree, Unit::wavenumber), WithinRel(219474.6313632, 1e-10));
    // k_B * 1 K = 0.69503476 cm^-1
    REQUIRE_THAT(convert(1.0, Unit::kelvin, Unit::wavenumber), WithinRel(0.695034800, 1e-8));
    REQUIRE_THAT(convert(1.0, Unit::joule, Unit::angular_frequency), WithinRel(1.0 / constants::hbar, 1e-15));
}

TEST_CASE("round trips through every energy unit") {
    const Unit units[] = {Unit::wavenumber, Unit::hertz,   Unit::kilohertz,     Unit::megahertz,
                          Unit::gigahertz,  Unit::terahertz, Unit::electron_volt, Unit::hartree,
                          Unit::joule,      Unit::kelvin};
    for (Unit a : units)
        for (Unit b : units) {
            const double x = 1.2345e3;
            REQUIRE_THAT(convert(convert(x, a, b), b, a), WithinRel(x, 1e-13));
        }
}

TEST_CASE("other dimensions") {
    REQUIRE_THAT(convert(1.0, Unit::angstrom, Unit::nanometer), WithinRel(0.1, 1e-15));
    REQUIRE_THAT(convert(60.0, Unit::millisecond, Unit::second), WithinRel(0.06, 1e-15));
    REQUIRE_THAT(convert(1.0, Unit::amu, Unit::kilogram), WithinRel(1.66053906660e-27, 1e-15));
    // 1 au of polarizability = 1.64877727436e-41 C m^2 / V
    REQUIRE_THAT(convert(1.0, Unit::au_polarizability, Unit::si_polarizability), WithinRel(1.64877727436e-41, 1e-9));
    // 1 au of dipole = 2.541746 D
    REQUIRE_THAT(convert(1.0, Unit::au_dipole, Unit::debye), WithinRel(2.5417464, 1e-7));
    REQUIRE_THAT(convert(250.0, Unit::milliwatt, Unit::watt), WithinRel(0.25, 1e-15));
}

TEST_CASE("mismatched dimensions are rejected") {
    REQUIRE_THROWS_AS(convert(1.0, Unit::wavenumber, Unit::angstrom), UnknownUnitPair);
    REQUIRE_THROWS_AS(convert(1.0, Unit::second, Unit::hertz), UnknownUnitPair);
    REQUIRE_THROWS_AS(convert(1.0, Unit::amu, Unit::debye), UnknownUnitPair);
}

TEST_CASE("unit symbols parse and print") {
    REQUIRE(parse_unit("cm^-1") == Unit::wavenumber);
    REQUIRE(parse_unit("cm-1") == Unit::wavenumber);
    REQUIRE(parse_unit("GHz") == Unit::gigahertz);
    REQUIRE(parse_unit("s^-1") == Unit::angular_frequency);
    REQUIRE(parse_unit("A") == Unit::angstrom);
    REQUIRE(parse_unit("amu") == Unit::amu);
    REQUIRE(parse_unit("au") == Unit::au_polarizability);
    REQUIRE(unit_symbol(Unit::kilohertz) == "kHz");
    REQUIRE(dimension_of(Unit::debye) == Dimension::dipole);
    REQUIRE_THROWS_AS(parse_unit("furlong"), UnknownUnitPair);
}

TEST_CASE("Quantity conversion keeps the target unit") {
    const Quantity q = convert(Quantity{75.0, Unit::kilohertz}, Unit::angular_frequency);
    REQUIRE(q.unit == Unit::angular_frequency);
    REQUIRE_THAT(q.value, WithinRel(2.0 * std::numbers::pi * 75e3, 1e-15));
}
