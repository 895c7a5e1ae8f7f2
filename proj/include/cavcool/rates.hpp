#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "cavcool/molecule.hpp"

namespace cavcool {

struct LaserSpec {
    double wavelength_nm = 532.0;
    double rabi_reference = 0.0;       // Omega_L,0->0, rad/s
    double detuning_offset = 0.0;      // added to 2 pi c / lambda, rad/s
    double reference_detuning = 0.0;   // Delta of the reference coupling, rad/s
    std::array<double, 3> propagation{1.0, 0.0, 0.0};
    std::string polarization = "linear";

    double base_frequency() const;                 // 2 pi c / lambda
    double omega() const { return base_frequency() + detuning_offset; }
    double wavenumber() const;                     // k_L, 1/m
    void validate(const std::array<double, 3>& cavity_axis) const;
};

struct CavitySpec {
    double length_cm = 1.0;
    double fsr = 0.0;            // rad/s
    double kappa = 0.0;          // half-linewidth, rad/s
    double g_reference = 0.0;    // g_c,0->0, rad/s
    double waist_um = 0.0;
    // |alpha| of the transition the reference couplings belong to (au);
    // every other line scales with |alpha_{vJ->v'J'}|^2 / reference_alpha^2.
    double reference_alpha = 1.0;
    long long mode_min = 1;      // retained absolute mode numbers
    long long mode_max = 1LL << 40;
    std::array<double, 3> axis{0.0, 0.0, 1.0};

    void validate() const;
    // Modes kept on each side of the nearest one: Lorentzian factor above 1e-8.
    int mode_halfwidth() const;
};

// Spontaneous-Raman Lorentzian weights of one intermediate channel.
struct LorentzianWeights {
    double plus = 0.0;
    double minus = 0.0;
};

// gamma+ = Omega^2 / ((Delta + k p/M)^2 + Gamma^2/4), gamma- with (Delta - 2 omega_L - k p/M).
LorentzianWeights lorentzian_weights(double rabi_sq, double detuning, double linewidth, double omega_L,
                                     double laser_doppler = 0.0);

// Rates between all basis states at one laser frequency and momentum.
// Matrices are row-major [from][to]; cavity rates are split by emission
// direction. Diagonal cavity entries are Rayleigh scattering, which leaves the
// internal state unchanged and only matters for the momentum model.
struct RateTable {
    std::shared_ptr<const RoVibBasis> basis;
    std::size_t n = 0;
    std::vector<double> spontaneous;
    std::vector<double> cavity_plus;
    std::vector<double> cavity_minus;
    double momentum = 0.0;       // kg m / s
    double laser_offset = 0.0;   // rad/s
    double omega_laser = 0.0;    // rad/s
    double fsr = 0.0;            // rad/s

    double spont(std::size_t i, std::size_t j) const { return spontaneous[i * n + j]; }
    double cav_plus(std::size_t i, std::size_t j) const { return cavity_plus[i * n + j]; }
    double cav_minus(std::size_t i, std::size_t j) const { return cavity_minus[i * n + j]; }
    double cavity(std::size_t i, std::size_t j) const { return cav_plus(i, j) + cav_minus(i, j); }
    // Total population-transfer rate i -> j (0 on the diagonal).
    double total(std::size_t i, std::size_t j) const { return i == j ? 0.0 : spont(i, j) + cavity(i, j); }
};

struct TransitionRegime {
    std::size_t from = 0;
    std::size_t to = 0;
    std::string label;
    double cavity_rate = 0.0;
    double spontaneous_rate = 0.0;  // total spontaneous loss rate of the source state
    double ratio = 0.0;
    bool pass = false;
};

struct RegimeReport {
    double threshold = 10.0;
    std::vector<TransitionRegime> driven;
    double coupling_strength = 0.0;  // |g Omega_L / Delta|, rad/s
    double coupling_ratio = 0.0;     // kappa / |g Omega_L / Delta|
    bool cooling_ok = false;         // every driven line has Gamma^kappa / Gamma^gamma > threshold
    bool coupling_ok = false;        // coupling_ratio > threshold
    bool ok() const { return cooling_ok && coupling_ok; }
    std::string text() const;
};

// A driven transition is a state-changing line whose emission lies within
// 3 kappa of a retained cavity mode.
RegimeReport check_regime(const RateTable& rates, const CavitySpec& cav, const LaserSpec& laser,
                          double threshold = 10.0);

// Transition label "v1-0:J3-1".
std::string transition_label(const RoVibState& from, const RoVibState& to);

}  // namespace cavcool
