#include <catch_amalgamated.hpp>

#include "cavcool/molecule.hpp"
#include "cavcool/schedule.hpp"
#include "cavcool/vibrational.hpp"

using namespace cavcool;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

double morse_level(double we, double wexe, int v) {
    const double x = v + 0.5;
    return we * x - wexe * x * x;
}

}  // namespace

TEST_CASE("Morse parameters from spectroscopic constants") {
    const auto p = MorseParams::from_spectroscopic(3735.21, 82.81, 0.948087, 0.96966);
    REQUIRE_THAT(p.well_depth, WithinRel(3735.21 * 3735.21 / (4.0 * 82.81), 1e-14));
    // omega_e = 2 a sqrt(D_e k) in cm^-1 with k = hbar^2 / (2 mu)
    const double k = constants::kinetic_cm1_A2 / 0.948087;
    REQUIRE_THAT(2.0 * p.range * std::sqrt(p.well_depth * k), WithinRel(3735.21, 1e-12));
    const auto curve = PotentialCurve::morse(p);
    REQUIRE_THAT(curve(0.96966), WithinAbs(0.0, 1e-9));
    REQUIRE_THAT(curve(50.0), WithinRel(p.well_depth, 1e-9));
}

TEST_CASE("OH Morse eigenvalues match the analytic levels for v <= 8") {
    const double we = 3735.21, wexe = 82.81, mu = 0.948087, re = 0.96966;
    const auto curve = PotentialCurve::morse(MorseParams::from_spectroscopic(we, wexe, mu, re));
    const RadialGrid grid{0.45, 3.8, 1024};
    const auto levels = solve_levels(curve, mu, grid, 9);
    REQUIRE(levels.size() == 9);
    for (int v = 0; v <= 8; ++v) {
        INFO("v = " << v);
        REQUIRE(levels[v].v == v);
        REQUIRE_THAT(levels[v].energy, WithinRel(morse_level(we, wexe, v), 1e-6));
    }
}

TEST_CASE("NO Morse eigenvalues, heavier molecule") {
    const double we = 1904.2, wexe = 14.075, mu = 7.46643, re = 1.15077;
    const auto curve = PotentialCurve::morse(MorseParams::from_spectroscopic(we, wexe, mu, re));
    const RadialGrid grid{0.85, 1.75, 1024};
    const auto levels = solve_levels(curve, mu, grid, 9);
    for (int v = 0; v <= 8; ++v) REQUIRE_THAT(levels[v].energy, WithinRel(morse_level(we, wexe, v), 1e-6));
}

TEST_CASE("wavefunctions are orthonormal") {
    const auto m = read_molecule_file(data_directory() / "oh.mol");
    const auto curve = PotentialCurve::morse(
        MorseParams::from_spectroscopic(m.omega_e, *m.omega_e_x_e, m.reduced_mass, m.r_e));
    const auto grid = default_grid(m, 8);
    const auto levels = solve_levels(curve, m.reduced_mass, grid, 9);
    for (std::size_t i = 0; i < levels.size(); ++i)
        for (std::size_t j = 0; j < levels.size(); ++j)
            REQUIRE_THAT(overlap(levels[i], levels[j]), WithinAbs(i == j ? 1.0 : 0.0, 1e-8));
}

TEST_CASE("doubling the grid changes the levels by less than 1e-8") {
    const double we = 3735.21, wexe = 82.81, mu = 0.948087, re = 0.96966;
    const auto curve = PotentialCurve::morse(MorseParams::from_spectroscopic(we, wexe, mu, re));
    const auto coarse = solve_levels(curve, mu, RadialGrid{0.45, 3.8, 512}, 9);
    const auto fine = solve_levels(curve, mu, RadialGrid{0.45, 3.8, 1023}, 9);
    for (int v = 0; v <= 8; ++v) {
        INFO("v = " << v);
        REQUIRE(std::abs(fine[v].energy - coarse[v].energy) / fine[v].energy < 1e-8);
    }
}

TEST_CASE("serial and parallel solvers agree") {
    const auto curve = PotentialCurve::morse(MorseParams::from_spectroscopic(3735.21, 82.81, 0.948087, 0.96966));
    const RadialGrid grid{0.45, 3.8, 256};
    const auto a = solve_levels(curve, 0.948087, grid, 5, Execution::serial);
    const auto b = solve_levels(curve, 0.948087, grid, 5, Execution::parallel);
    for (int v = 0; v < 5; ++v) {
        REQUIRE_THAT(a[v].energy, WithinRel(b[v].energy, 1e-12));
        REQUIRE_THAT(overlap(a[v], b[v]), WithinAbs(1.0, 1e-10));
    }
}

TEST_CASE("harmonic oscillator in abstract units") {
    // -d^2/dx^2 + x^2 has levels 2v + 1
    VibrationalProblem prob;
    prob.grid = RadialGrid{-10.0, 10.0, 301};
    prob.kinetic_factor = 1.0;
    prob.bound_limit = 1e9;
    for (double x : prob.grid.points()) prob.potential.push_back(x * x);
    const auto levels = solve(prob, 6);
    for (int v = 0; v < 6; ++v) REQUIRE_THAT(levels[v].energy, WithinRel(2.0 * v + 1.0, 1e-10));
}

TEST_CASE("matrix elements of R") {
    const auto curve = PotentialCurve::morse(MorseParams::from_spectroscopic(3735.21, 82.81, 0.948087, 0.96966));
    const RadialGrid grid{0.45, 3.8, 512};
    const auto levels = solve_levels(curve, 0.948087, grid, 3);
    std::vector<double> r = grid.points();
    std::vector<double> one(r.size(), 1.0);
    REQUIRE_THAT(matrix_element(one, levels[0], levels[0]), WithinAbs(1.0, 1e-10));
    // anharmonicity pushes <R> outward with v
    REQUIRE(matrix_element(r, levels[1], levels[1]) > matrix_element(r, levels[0], levels[0]));
    REQUIRE(std::abs(matrix_element(r, levels[0], levels[1])) > 0.0);
}

TEST_CASE("tabulated curves reproduce the analytic Morse levels") {
    const auto p = MorseParams::from_spectroscopic(3735.21, 82.81, 0.948087, 0.96966);
    const auto morse = PotentialCurve::morse(p);
    std::vector<double> r, v;
    for (double x = 0.45; x <= 3.8001; x += 0.005) {
        r.push_back(x);
        v.push_back(morse(x));
    }
    const auto tab = PotentialCurve::tabulated(r, v);
    const RadialGrid grid{0.5, 3.7, 512};
    const auto a = solve_levels(morse, 0.948087, grid, 4);
    const auto b = solve_levels(tab, 0.948087, grid, 4);
    for (int k = 0; k < 4; ++k) REQUIRE_THAT(b[k].energy, WithinRel(a[k].energy, 1e-4));
    REQUIRE_THROWS_AS(tab(0.1), OutOfRange);
}

TEST_CASE("invalid grids and curves are rejected") {
    REQUIRE_THROWS(RadialGrid{1.0, 0.5, 128}.validate(0.97));
    REQUIRE_THROWS(RadialGrid{0.5, 3.0, 16}.validate(0.97));
    REQUIRE_THROWS(PotentialCurve::tabulated({1, 2, 3}, {0, 1, 2}));
    REQUIRE_THROWS(MonotoneCubic({1, 1, 2}, {0, 1, 2}));
}

TEST_CASE("monotone cubic preserves monotonic data") {
    MonotoneCubic f({0, 1, 2, 3, 4}, {0, 0.1, 0.9, 1.0, 1.0});
    double prev = -1.0;
    for (double x = 0.0; x <= 4.0; x += 0.01) {
        const double y = f(x);
        REQUIRE(y >= prev - 1e-15);
        prev = y;
    }
    REQUIRE_THAT(f(2.0), WithinAbs(0.9, 1e-15));
}
