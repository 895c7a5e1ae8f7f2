#include "cavcool/vibrational.hpp"

#include <math.h>  // pchip.hpp calls isnan unqualified

#include <Eigen/Dense>
#include <boost/math/interpolators/pchip.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace cavcool {

MonotoneCubic::MonotoneCubic(std::vector<double> x, std::vector<double> y) {
    if (x.size() != y.size() || x.size() < 4) throw Error("monotone cubic needs at least 4 paired samples");
    for (std::size_t i = 1; i < x.size(); ++i)
        if (!(x[i] > x[i - 1])) throw Error("interpolation abscissae must be strictly increasing");
    x_min_ = x.front();
    x_max_ = x.back();
    auto spline = std::make_shared<boost::math::interpolators::pchip<std::vector<double>>>(std::move(x), std::move(y));
    impl_ = std::make_shared<const std::function<double(double)>>([spline](double t) { return (*spline)(t); });
}

double MonotoneCubic::operator()(double x) const {
    if (!impl_) throw Error("empty interpolant");
    // a few ulps of slack for grid points computed as r_min + i * dx
    const double slack = 1e-12 * std::max(1.0, std::abs(x_max_));
    if (x < x_min_ - slack || x > x_max_ + slack)
        throw OutOfRange("interpolation at " + std::to_string(x) + " outside [" + std::to_string(x_min_) + ", " +
                         std::to_string(x_max_) + "]");
    return (*impl_)(std::clamp(x, x_min_, x_max_));
}

MorseParams MorseParams::from_spectroscopic(double omega_e, double omega_e_x_e, double mu, double r_e) {
    if (omega_e <= 0.0 || omega_e_x_e <= 0.0 || mu <= 0.0)
        throw Error("Morse construction needs omega_e > 0, omega_e x_e > 0 and mu > 0");
    MorseParams p;
    p.well_depth = omega_e * omega_e / (4.0 * omega_e_x_e);
    p.range = std::sqrt(omega_e_x_e * mu / constants::kinetic_cm1_A2);
    p.r_e = r_e;
    return p;
}

PotentialCurve PotentialCurve::morse(MorseParams p) {
    if (p.well_depth <= 0.0 || p.range <= 0.0) throw Error("Morse curve needs D_e > 0 and a > 0");
    PotentialCurve c;
    c.kind_ = Kind::morse;
    c.morse_ = p;
    return c;
}

PotentialCurve PotentialCurve::tabulated(std::vector<double> r, std::vector<double> v) {
    if (r.size() < 8 || r.size() != v.size()) throw Error("tabulated curve needs at least 8 (R, V) samples");
    PotentialCurve c;
    c.kind_ = Kind::tabulated;
    c.r_ = r;
    c.v_ = v;
    c.spline_ = MonotoneCubic(std::move(r), std::move(v));
    return c;
}

double PotentialCurve::operator()(double r) const {
    if (kind_ == Kind::morse) {
        const double x = 1.0 - std::exp(-morse_.range * (r - morse_.r_e));
        return morse_.well_depth * x * x;
    }
    return spline_(r);
}

double PotentialCurve::dissociation_limit() const {
    return kind_ == Kind::morse ? morse_.well_depth : v_.back();
}

double PotentialCurve::r_min() const { return kind_ == Kind::morse ? 0.0 : r_.front(); }
double PotentialCurve::r_max() const {
    return kind_ == Kind::morse ? std::numeric_limits<double>::infinity() : r_.back();
}

std::vector<double> RadialGrid::points() const {
    std::vector<double> out(static_cast<std::size_t>(n_points));
    for (int i = 0; i < n_points; ++i) out[static_cast<std::size_t>(i)] = point(i);
    return out;
}

void RadialGrid::validate(double r_e) const {
    if (n_points < 64) throw Error("radial grid needs at least 64 points");
    if (!(r_min < r_e && r_e < r_max)) throw Error("radial grid must bracket the equilibrium distance");
}

std::vector<VibrationalLevel> solve(const VibrationalProblem& problem, int n_levels, Execution ex) {
    const auto& grid = problem.grid;
    const auto n = static_cast<std::size_t>(grid.n_points);
    if (n_levels < 1) throw SolverFailure("n_levels must be >= 1");
    if (problem.potential.size() != n) throw GridMismatch("potential samples do not match the grid");
    if (static_cast<std::size_t>(n_levels) > n) throw NotEnoughBoundStates("more levels requested than grid points");

    const double dx = grid.spacing();
    Eigen::MatrixXd h(n, n);
    kernels::dvr_kinetic({n, problem.kinetic_factor / (dx * dx)}, std::span<double>(h.data(), n * n), ex);
    for (std::size_t i = 0; i < n; ++i) h(i, i) += problem.potential[i];

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(h);
    if (eig.info() != Eigen::Success) throw SolverFailure("eigen decomposition failed");

    std::vector<VibrationalLevel> levels;
    levels.reserve(static_cast<std::size_t>(n_levels));
    const double scale = 1.0 / std::sqrt(dx);
    for (int v = 0; v < n_levels; ++v) {
        const double e = eig.eigenvalues()(v);
        if (!(e < problem.bound_limit))
            throw NotEnoughBoundStates("level v=" + std::to_string(v) + " at " + std::to_string(e) +
                                       " is not below the dissociation limit " +
                                       std::to_string(problem.bound_limit));
        Eigen::VectorXd c = eig.eigenvectors().col(v);
        const double peak = c.cwiseAbs().maxCoeff();
        // tail check relative to the peak amplitude
        if (std::abs(c(0)) > 1e-6 * peak || std::abs(c(static_cast<Eigen::Index>(n) - 1)) > 1e-6 * peak)
            throw GridTooSmall("wavefunction v=" + std::to_string(v) + " does not decay at the grid boundary");
        // sign: outermost significant lobe positive
        for (Eigen::Index i = static_cast<Eigen::Index>(n) - 1; i >= 0; --i) {
            if (std::abs(c(i)) > 1e-3 * peak) {
                if (c(i) < 0.0) c = -c;
                break;
            }
        }
        VibrationalLevel level;
        level.v = v;
        level.energy = e;
        level.grid = grid;
        level.wavefunction.resize(n);
        for (std::size_t i = 0; i < n; ++i) level.wavefunction[i] = c(static_cast<Eigen::Index>(i)) * scale;
        levels.push_back(std::move(level));
    }
    return levels;
}

std::vector<VibrationalLevel> solve_levels(const PotentialCurve& curve, double mu, const RadialGrid& grid,
                                           int n_levels, Execution ex) {
    if (mu <= 0.0) throw Error("reduced mass must be positive");
    if (grid.n_points < 64) throw Error("radial grid needs at least 64 points");
    if (grid.r_min < curve.r_min() || grid.r_max > curve.r_max())
        throw OutOfRange("radial grid extends beyond the tabulated potential");
    VibrationalProblem problem;
    problem.grid = grid;
    problem.potential.resize(static_cast<std::size_t>(grid.n_points));
    for (int i = 0; i < grid.n_points; ++i) problem.potential[static_cast<std::size_t>(i)] = curve(grid.point(i));
    problem.kinetic_factor = constants::kinetic_cm1_A2 / mu;
    problem.bound_limit = curve.dissociation_limit();
    return solve(problem, n_levels, ex);
}

double matrix_element(std::span<const double> f, const VibrationalLevel& bra, const VibrationalLevel& ket) {
    if (!(bra.grid == ket.grid) || f.size() != bra.wavefunction.size())
        throw GridMismatch("matrix element operands live on different grids");
    const double dx = bra.grid.spacing();
    double sum = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) sum += f[i] * (bra.wavefunction[i] * ket.wavefunction[i]);
    return sum * dx;
}

double overlap(const VibrationalLevel& bra, const VibrationalLevel& ket) {
    const std::vector<double> one(bra.wavefunction.size(), 1.0);
    return matrix_element(one, bra, ket);
}

PotentialCurve read_pes_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open PES file " + path);
    std::vector<double> r, v;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        for (char& ch : line)
            if (ch == ',' || ch == ';') ch = ' ';
        std::istringstream ss(line);
        double a = 0.0, b = 0.0;
        if (!(ss >> a)) continue;
        if (!(ss >> b)) throw Error(path + ":" + std::to_string(lineno) + ": expected two columns");
        r.push_back(a);
        v.push_back(b);
    }
    return PotentialCurve::tabulated(std::move(r), std::move(v));
}

}  // namespace cavcool
