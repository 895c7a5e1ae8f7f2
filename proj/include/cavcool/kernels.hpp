#pragma once

// Flat data-parallel kernels. Every kernel exists twice: a serial reference
// (kernels::serial) and an OpenMP version (kernels::omp) with identical
// results. Domain modules call the Execution-dispatching wrappers, tests compare
// the two, and bench/ times them against each other.

#include <cstddef>
#include <span>
#include <vector>

namespace cavcool {

enum class Execution { serial, parallel };

namespace kernels {

// Column-major n x n sinc-DVR kinetic matrix on a uniform grid:
//   T_ii = prefactor * pi^2 / 3,  T_ij = prefactor * 2 (-1)^(i-j) / (i-j)^2
// with prefactor = hbar^2 / (2 mu dx^2) in the caller's energy unit.
struct DvrKineticInput {
    std::size_t n = 0;
    double prefactor = 0.0;
};

// One spontaneous-Raman intermediate channel (excited electronic state E,
// vibrational level v''). Per-state arrays are indexed by basis state.
struct ExcitationChannel {
    double energy = 0.0;     // excited-level energy above the ground-well bottom, rad/s
    double linewidth = 0.0;  // Gamma_E, rad/s
    std::vector<double> rabi_sq;        // Omega^2_{xi -> channel} per initial state
    std::vector<double> branching;      // Gamma_{channel -> xi'} per final state, s^-1
};

// Inputs of the per-pair rate formulas at one laser frequency and momentum.
struct RateKernelInput {
    std::size_t n_states = 0;
    std::span<const double> energy;         // omega_xi above the ground-well bottom, rad/s
    std::span<const double> strength;       // |alpha_{xi->xi'}|^2 (au^2), row-major n x n
    std::span<const double> rot_factor;     // S_{J->J'} weighting of spontaneous decay, row-major
    std::span<const ExcitationChannel> channels;

    double omega_laser = 0.0;     // rad/s
    double laser_doppler = 0.0;   // k_L . p / M, rad/s
    double cavity_doppler = 0.0;  // k_c . p / M, rad/s
    double kappa = 0.0;           // cavity half-linewidth, rad/s
    double fsr = 0.0;             // rad/s
    long long mode_min = 0;       // retained absolute mode numbers
    long long mode_max = 0;
    int mode_halfwidth = 1;       // modes kept on each side of the nearest one
    double cavity_prefactor = 0.0;  // 2 kappa |g^+-|^2 / alpha_ref^2, rad/s^2 per au^2
    double gamma_plus_ref = 0.0;    // reference Lorentzian weights (dimensionless)
    double gamma_minus_ref = 0.0;
};

struct RateKernelOutput {
    std::span<double> spontaneous;   // n x n row-major; diagonal left zero
    std::span<double> cavity_plus;
    std::span<double> cavity_minus;
};

// Explicit momentum-grid update. W is [state][p] row-major with n_p momenta.
// rates is [p][from][to][dir] with dir 0 = "+" (recoil -shift), 1 = "-".
// Process "+" takes a molecule at grid index k to k - shift, "-" to k + shift;
// weight leaving the grid is kept in the edge cell.
struct MomentumKernelInput {
    std::size_t n_states = 0;
    std::size_t n_p = 0;
    int shift = 1;
    double dt = 0.0;
    std::span<const double> weight;
    std::span<const double> rates;
};

namespace serial {
void dvr_kinetic(const DvrKineticInput& in, std::span<double> out);
void rate_table(const RateKernelInput& in, const RateKernelOutput& out);
void momentum_step(const MomentumKernelInput& in, std::span<double> out);
}  // namespace serial

namespace omp {
void dvr_kinetic(const DvrKineticInput& in, std::span<double> out);
void rate_table(const RateKernelInput& in, const RateKernelOutput& out);
void momentum_step(const MomentumKernelInput& in, std::span<double> out);
}  // namespace omp

inline void dvr_kinetic(const DvrKineticInput& in, std::span<double> out, Execution ex) {
    ex == Execution::parallel ? omp::dvr_kinetic(in, out) : serial::dvr_kinetic(in, out);
}
inline void rate_table(const RateKernelInput& in, const RateKernelOutput& out, Execution ex) {
    ex == Execution::parallel ? omp::rate_table(in, out) : serial::rate_table(in, out);
}
inline void momentum_step(const MomentumKernelInput& in, std::span<double> out, Execution ex) {
    ex == Execution::parallel ? omp::momentum_step(in, out) : serial::momentum_step(in, out);
}

// Single-element building blocks shared by both variants. direction is +1
// for the "+" emission channel and -1 for "-".
double cavity_pair_rate(const RateKernelInput& in, std::size_t from, std::size_t to, int direction);
double spontaneous_pair_rate(const RateKernelInput& in, std::size_t from, std::size_t to);
double momentum_cell(const MomentumKernelInput& in, std::size_t state, std::size_t k);

}  // namespace kernels
}  // namespace cavcool
