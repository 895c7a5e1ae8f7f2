#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "cavcool/kernels.hpp"
#include "cavcool/units.hpp"

namespace cavcool {

class SolverFailure : public Error {
public:
    using Error::Error;
};
class GridTooSmall : public SolverFailure {
public:
    using SolverFailure::SolverFailure;
};
class NotEnoughBoundStates : public SolverFailure {
public:
    using SolverFailure::SolverFailure;
};
class GridMismatch : public Error {
public:
    using Error::Error;
};
class OutOfRange : public Error {
public:
    using Error::Error;
};

// Monotone piecewise-cubic interpolant over strictly increasing samples.
// Evaluation outside [front, back] throws OutOfRange.
class MonotoneCubic {
public:
    MonotoneCubic() = default;
    MonotoneCubic(std::vector<double> x, std::vector<double> y);

    double operator()(double x) const;
    double x_min() const { return x_min_; }
    double x_max() const { return x_max_; }
    bool empty() const { return !impl_; }

private:
    std::shared_ptr<const std::function<double(double)>> impl_;
    double x_min_ = 0.0;
    double x_max_ = 0.0;
};

struct MorseParams {
    double well_depth = 0.0;  // D_e, cm^-1
    double range = 0.0;       // a, 1/A
    double r_e = 0.0;         // A

    // D_e = omega_e^2 / (4 omega_e x_e), a = sqrt(omega_e x_e * mu / (hbar^2/2 amu)).
    static MorseParams from_spectroscopic(double omega_e, double omega_e_x_e, double reduced_mass_amu, double r_e);
};

// One-dimensional potential-energy curve V(R), R in A and V in cm^-1.
class PotentialCurve {
public:
    enum class Kind { morse, tabulated };

    static PotentialCurve morse(MorseParams p);
    // At least 8 strictly increasing samples.
    static PotentialCurve tabulated(std::vector<double> r, std::vector<double> v);

    double operator()(double r) const;
    Kind kind() const { return kind_; }
    const MorseParams& morse_params() const { return morse_; }
    // Energy above which levels are no longer bound (D_e or V at the outer edge).
    double dissociation_limit() const;
    double r_min() const;
    double r_max() const;

private:
    Kind kind_ = Kind::morse;
    MorseParams morse_;
    std::vector<double> r_;
    std::vector<double> v_;
    MonotoneCubic spline_;
};

struct RadialGrid {
    double r_min = 0.0;  // A
    double r_max = 0.0;  // A
    int n_points = 0;

    double spacing() const { return (r_max - r_min) / (n_points - 1); }
    double point(int i) const { return r_min + i * spacing(); }
    std::vector<double> points() const;
    // Requires r_min < r_e < r_max and n_points >= 64.
    void validate(double r_e) const;

    bool operator==(const RadialGrid&) const = default;
};

struct VibrationalLevel {
    int v = 0;
    double energy = 0.0;  // above the potential minimum, cm^-1
    RadialGrid grid;
    std::vector<double> wavefunction;  // L2-normalised on the grid, positive outer lobe
};

// A discretised Hamiltonian -k d^2/dR^2 + V(R) in arbitrary consistent units.
struct VibrationalProblem {
    RadialGrid grid;
    std::vector<double> potential;  // V on grid points
    double kinetic_factor = 0.0;    // hbar^2 / (2 mu) in energy * length^2
    double bound_limit = 0.0;       // levels must lie below this energy
};

// Lowest n_levels eigenpairs of the problem (sinc-DVR), ascending.
std::vector<VibrationalLevel> solve(const VibrationalProblem& problem, int n_levels,
                                    Execution ex = Execution::parallel);

// Physical units: potential in cm^-1 over A, reduced mass in amu.
std::vector<VibrationalLevel> solve_levels(const PotentialCurve& curve, double reduced_mass_amu,
                                           const RadialGrid& grid, int n_levels,
                                           Execution ex = Execution::parallel);

// Quadrature of bra(R) f(R) ket(R) dR. f is sampled on the shared grid.
double matrix_element(std::span<const double> f, const VibrationalLevel& bra, const VibrationalLevel& ket);
double overlap(const VibrationalLevel& bra, const VibrationalLevel& ket);

// Two columns (R in A, V in cm^-1); '#' starts a comment.
PotentialCurve read_pes_file(const std::string& path);

}  // namespace cavcool
