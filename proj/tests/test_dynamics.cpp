#include <catch_amalgamated.hpp>

#include <random>

#include "cavcool/dynamics.hpp"
#include "cavcool/spectrum.hpp"
#include "common.hpp"

using namespace cavcool;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

Eigen::MatrixXd two_level(double a, double b) {
    // a: 0 -> 1, b: 1 -> 0
    Eigen::MatrixXd r = Eigen::MatrixXd::Zero(2, 2);
    r(0, 1) = a;
    r(1, 0) = b;
    return generator_from_rates(r);
}

Eigen::MatrixXd random_generator(int n, unsigned seed, double density = 1.0) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Eigen::MatrixXd r = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j && u(rng) < density) r(i, j) = 50.0 * u(rng);
    return generator_from_rates(r);
}

std::shared_ptr<const RoVibBasis> small_basis(int J_max) {
    return testing::model_for("defaults-oh").basis()->J_max == J_max
               ? testing::model_for("defaults-oh").basis()
               : std::make_shared<const RoVibBasis>(build_basis(testing::model_for("defaults-oh").basis()->molecule, 0, J_max));
}

}  // namespace

TEST_CASE("generator layout") {
    const auto m = two_level(3.0, 5.0);
    REQUIRE(m(1, 0) == 3.0);
    REQUIRE(m(0, 1) == 5.0);
    REQUIRE(m(0, 0) == -3.0);
    REQUIRE(m(1, 1) == -5.0);
    REQUIRE_NOTHROW(check_generator(m));
    Eigen::MatrixXd bad = m;
    bad(1, 0) = -1.0;
    REQUIRE_THROWS_AS(check_generator(bad), NonGenerator);
    bad = m;
    bad(0, 0) = -2.0;
    REQUIRE_THROWS_AS(check_generator(bad), NonGenerator);
}

TEST_CASE("two-level decay matches the analytic solution") {
    const double a = 7.0, b = 2.0;
    const auto m = two_level(a, b);
    const double pinf = b / (a + b);
    auto basis = small_basis(1);
    for (double t : {1e-4, 0.01, 0.1, 0.37, 1.0, 5.0}) {
        PopulationVector p{basis, {1.0, 0.0}, 0.0};
        const auto q = propagate_step(p, m, t);
        const double exact = pinf + (1.0 - pinf) * std::exp(-(a + b) * t);
        REQUIRE_THAT(q.p[0], WithinAbs(exact, 1e-9));
        REQUIRE_THAT(q.p[1], WithinAbs(1.0 - exact, 1e-9));
        REQUIRE_THAT(q.time, WithinAbs(t, 1e-15));
    }
}

TEST_CASE("pure decay of a single channel") {
    const double a = 40.0;
    const auto m = two_level(a, 0.0);
    auto basis = small_basis(1);
    PopulationVector p{basis, {1.0, 0.0}, 0.0};
    const auto q = propagate_step(p, m, 0.05);
    REQUIRE_THAT(q.p[0], WithinAbs(std::exp(-a * 0.05), 1e-9));
}

TEST_CASE("two-level stationary state") {
    const auto s = stationary(two_level(7.0, 2.0));
    REQUIRE_THAT(s(0), WithinAbs(2.0 / 9.0, 1e-9));
    REQUIRE_THAT(s(1), WithinAbs(7.0 / 9.0, 1e-9));
}

TEST_CASE("stationary state is a null vector and satisfies detailed balance on a chain") {
    // birth-death chain: stationary ratios are products of rate ratios
    const int n = 6;
    Eigen::MatrixXd r = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i + 1 < n; ++i) {
        r(i, i + 1) = 1.0 + i;
        r(i + 1, i) = 3.0;
    }
    const auto m = generator_from_rates(r);
    const auto s = stationary(m);
    REQUIRE((m * s).cwiseAbs().maxCoeff() < 1e-9);
    REQUIRE_THAT(s.sum(), WithinAbs(1.0, 1e-12));
    for (int i = 0; i + 1 < n; ++i) REQUIRE_THAT(s(i + 1) / s(i), WithinRel((1.0 + i) / 3.0, 1e-9));
}

TEST_CASE("matrix exponential agrees with a Taylor-series oracle") {
    for (unsigned seed : {1u, 2u, 3u}) {
        const auto m = random_generator(9, seed, 0.5);
        for (double dt : {1e-3, 0.02, 0.3}) {
            const Propagator p(m, dt);
            const Eigen::MatrixXd ref = testing::taylor_exp(m * dt);
            REQUIRE((p.matrix() - ref).cwiseAbs().maxCoeff() < 1e-11);
        }
    }
}

TEST_CASE("semigroup property") {
    const auto m = random_generator(9, 7);
    const double t1 = 0.013, t2 = 0.041;
    const Propagator a(m, t1), b(m, t2), ab(m, t1 + t2);
    REQUIRE((b.matrix() * a.matrix() - ab.matrix()).cwiseAbs().maxCoeff() < 1e-10);
    // and step splitting of a population vector
    auto basis = small_basis(8);
    PopulationVector p{basis, std::vector<double>(9, 1.0 / 9.0), 0.0};
    auto q = p;
    a.apply(q);
    b.apply(q);
    auto r = p;
    ab.apply(r);
    for (int i = 0; i < 9; ++i) REQUIRE_THAT(q.p[i], WithinAbs(r.p[i], 1e-10));
}

TEST_CASE("propagation conserves population without renormalising") {
    const auto m = random_generator(9, 11);
    const Propagator p(m, 1e-3);
    Eigen::VectorXd x = Eigen::VectorXd::Constant(9, 1.0 / 9.0);
    for (int k = 0; k < 100000; ++k) x = p.matrix() * x;
    REQUIRE(std::abs(x.sum() - 1.0) < 1e-9);
    REQUIRE(x.minCoeff() >= 0.0);
}

TEST_CASE("sanitize") {
    std::vector<double> p{0.5, -1e-13, 0.5};
    sanitize(p);
    REQUIRE(p[1] == 0.0);
    REQUIRE_THAT(p[0] + p[2], WithinAbs(1.0, 1e-15));
    std::vector<double> bad{0.5, -1e-6, 0.5};
    REQUIRE_THROWS_AS(sanitize(bad), NegativePopulation);
    std::vector<double> zero{0.0, 0.0};
    REQUIRE_THROWS_AS(sanitize(zero), NegativePopulation);
}

TEST_CASE("two parity ladders make the OH generator reducible") {
    const auto& m = testing::model_for("defaults-oh");
    const auto& b = *m.basis();
    const double off = detuning_for(b, b.index_of(0, 3), b.index_of(0, 1), m.cavity(), m.laser());
    const auto g = generator(m.rates(off));
    REQUIRE_THROWS_AS(stationary(g), ReducibleGenerator);
    try {
        stationary(g);
    } catch (const ReducibleGenerator& e) {
        REQUIRE(e.blocks().size() == 2);
        for (const auto& blk : e.blocks()) REQUIRE_THAT(blk.distribution.sum(), WithinAbs(1.0, 1e-12));
    }
    // the long-time limit keeps each ladder's weight
    const auto p0 = boltzmann_populations(m.basis(), 300.0);
    const auto inf = stationary_from(g, Eigen::Map<const Eigen::VectorXd>(p0.p.data(), p0.p.size()));
    double odd = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i)
        if (b.states[i].ladder == Ladder::odd) odd += inf(i);
    REQUIRE_THAT(odd, WithinAbs(p0.odd_fraction(), 1e-9));
    // and agrees with a long propagation
    const Propagator longp(g, 1000.0);
    auto q = p0;
    for (int k = 0; k < 20; ++k) longp.apply(q);
    for (std::size_t i = 0; i < b.size(); ++i) REQUIRE_THAT(q.p[i], WithinAbs(inf(i), 1e-8));
}

TEST_CASE("trajectory observables and export") {
    auto basis = small_basis(8);
    PopulationTrajectory t;
    t.basis = basis;
    std::vector<double> a(9, 0.0), c(9, 0.0);
    a[2] = 1.0;
    c[0] = 0.5;
    c[1] = 0.5;
    t.append(PopulationVector{basis, a, 0.0}, "start");
    t.append(PopulationVector{basis, c, 0.06}, "v0-0:J2-0");
    REQUIRE(t.size() == 2);
    REQUIRE(t.mean_J(0) == 2.0);
    REQUIRE(t.mean_J(1) == 0.5);
    REQUIRE(t.ground_fraction(1) == 1.0);
    REQUIRE(t.back().time == 0.06);
    const auto text = export_trajectory(t, {"hello"});
    REQUIRE(text.starts_with("# hello\nt_s\tv0:J0\tv0:J1"));
    REQUIRE(text.find("\tmeanJ\tmeanV\tEkin_J\n") != std::string::npos);
    REQUIRE(text.find("0.06\t0.5\t0.5\t0") != std::string::npos);
}
