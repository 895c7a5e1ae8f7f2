#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cavcool/molecule.hpp"
#include "cavcool/rates.hpp"

namespace cavcool {

class ForbiddenTransition : public Error {
public:
    using Error::Error;
};
class NoSolutionInRange : public Error {
public:
    using Error::Error;
};

enum class LineKind { stokes, anti_stokes, rayleigh };
const char* to_string(LineKind k);

struct SpectrumLine {
    std::size_t from = 0;
    std::size_t to = 0;
    RoVibState from_state;
    RoVibState to_state;
    LineKind kind = LineKind::rayleigh;
    double absolute_shift = 0.0;  // omega_from - omega_to, rad/s
    double folded_offset = 0.0;   // emitted frequency mod FSR, in [0, FSR)
    std::string label;
};

struct ReducedSpectrum {
    std::vector<SpectrumLine> lines;
    double fsr = 0.0;           // rad/s
    double omega_laser = 0.0;   // rad/s
    double laser_offset = 0.0;  // rad/s

    std::vector<const SpectrumLine*> of_kind(LineKind k) const;
    const SpectrumLine* find(const std::string& label) const;
};

bool raman_allowed(const RoVibState& a, const RoVibState& b);

// Every allowed line (|dJ| in {0, 2}, any dv, nonzero rotational factor) plus
// one Rayleigh line per state, folded into one FSR.
ReducedSpectrum fold(const RoVibBasis& basis, const CavitySpec& cav, const LaserSpec& laser,
                     std::optional<double> fsr_override = std::nullopt);

// (x mod fsr) in [0, fsr), evaluated in long double.
double fold_frequency(long double x, double fsr);

// Smallest-magnitude laser offset (relative to 2 pi c / lambda, within
// +-FSR/2) that puts the line emitted by from -> to onto a comb mode. A tie
// at exactly FSR/2 resolves to the negative offset.
double detuning_for(const RoVibBasis& basis, std::size_t from, std::size_t to, const CavitySpec& cav,
                    const LaserSpec& laser, std::optional<double> fsr_override = std::nullopt);

struct FsrSolution {
    double fsr = 0.0;           // rad/s
    double laser_offset = 0.0;  // rad/s
    double residual = 0.0;      // detuning of the second line from its mode, rad/s
};

// FSR within +-0.5% of nominal placing both lines on comb modes (within
// tolerance, rad/s) under one laser offset. Closest-to-nominal solution wins.
FsrSolution tune_fsr_for_pair(const RoVibBasis& basis, std::size_t from1, std::size_t to1, std::size_t from2,
                              std::size_t to2, const CavitySpec& cav, const LaserSpec& laser, double tolerance);

// Stokes lines within `width_kappa` cavity half-linewidths of a mode.
std::vector<const SpectrumLine*> stokes_collisions(const ReducedSpectrum& s, double kappa, double width_kappa = 5.0);

// Plot-ready text: '#' header then one tab-separated row per line.
std::string export_spectrum(const ReducedSpectrum& s, double kappa);

}  // namespace cavcool
