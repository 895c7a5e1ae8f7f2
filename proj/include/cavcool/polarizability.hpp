#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "cavcool/molecule.hpp"
#include "cavcool/vibrational.hpp"

namespace cavcool {

class NearResonance : public Error {
public:
    using Error::Error;
};
class WindowCoversPhysicalRegion : public Error {
public:
    using Error::Error;
};

struct RadialWindow {
    double r_lo = 0.0;  // A
    double r_hi = 0.0;
};

// Sampled alpha(R) curve. smoothed[i] marks samples replaced by interpolation.
struct SampledCurve {
    std::vector<double> r;  // A, strictly increasing
    std::vector<double> value;
    std::vector<bool> smoothed;
};

// Replaces samples strictly inside each window by a monotone cubic through
// the samples outside of it. `protected_regions` are R intervals that a
// window may not overlap (equilibrium distance, classically allowed regions).
SampledCurve smooth_resonances(const SampledCurve& curve, const std::vector<RadialWindow>& windows,
                               const std::vector<RadialWindow>& protected_regions = {});

// One intermediate electronic state of the sum-over-states expression.
// Energies in hartree above the ground state at the same R, dipoles in au.
struct ExcitedStateData {
    std::string label;
    std::function<double(double)> dipole_parallel;       // along the bond
    std::function<double(double)> dipole_perpendicular;  // per transverse axis
    std::function<double(double)> energy;                // hbar omega_E(R) - hbar omega_X(R)
};

struct DynamicAlpha {
    double iso = 0.0;        // alpha^(0)
    double traceless = 0.0;  // alpha^(2)_zz
    double zz = 0.0;
    double xx = 0.0;
};

// Two-term sum over states at bond length R; omega_L in hartree.
// Each term is D^2 [1/Delta + 1/(Delta - 2 omega_L)] with Delta = omega_L - E.
// Throws NearResonance when either denominator is inside `guard` (hartree).
DynamicAlpha dynamic_alpha(const std::vector<ExcitedStateData>& states, double r, double omega_L,
                           double guard = 1e-3);

class PolarizabilityModel {
public:
    enum class Source { curve, sum_over_states };

    // Curves sampled at common R points.
    static PolarizabilityModel from_curves(SampledCurve iso, SampledCurve traceless, double laser_frequency,
                                           std::string provenance);
    // Samples the sum-over-states expression on `r` (smoothing applied by the caller).
    static PolarizabilityModel from_states(const std::vector<ExcitedStateData>& states, const std::vector<double>& r,
                                           double omega_L_hartree, const std::vector<RadialWindow>& windows,
                                           double guard = 1e-3);

    // Smooth the stored curves over `windows`, guarding `protected_regions`.
    PolarizabilityModel smoothed(const std::vector<RadialWindow>& windows,
                                 const std::vector<RadialWindow>& protected_regions) const;
    // Multiply both curves by a constant (NO stand-in).
    PolarizabilityModel scaled(double factor) const;
    // Re-centre both curves: alpha'(R) = alpha(R - shift).
    PolarizabilityModel shifted(double shift) const;

    double iso(double r) const { return iso_spline_(r); }
    double traceless(double r) const { return traceless_spline_(r); }
    // Samples on a radial grid; throws OutOfRange if the grid exceeds the curve.
    std::vector<double> sample_iso(const RadialGrid& g) const;
    std::vector<double> sample_traceless(const RadialGrid& g) const;

    Source source() const { return source_; }
    double laser_frequency() const { return laser_frequency_; }  // rad/s
    const std::string& provenance() const { return provenance_; }
    const SampledCurve& iso_curve() const { return iso_; }
    const SampledCurve& traceless_curve() const { return traceless_; }
    const std::vector<RadialWindow>& windows() const { return windows_; }

private:
    void build();

    Source source_ = Source::curve;
    SampledCurve iso_;
    SampledCurve traceless_;
    double laser_frequency_ = 0.0;
    std::string provenance_;
    std::vector<RadialWindow> windows_;
    MonotoneCubic iso_spline_;
    MonotoneCubic traceless_spline_;
};

// Three columns: R (A), alpha0 (au), alpha2_zz (au). Comment lines may carry
// "# wavelength_nm = <x>" and "# provenance = <text>".
PolarizabilityModel read_polarizability_file(const std::filesystem::path& path);

// Placzek-Teller rotational factor for a diatomic; 0 unless |J - J'| in {0, 2}.
double placzek_teller(int J, int J_prime);

enum class Component { none, iso, traceless, both };

struct TransitionStrength {
    RoVibState from;
    RoVibState to;
    double alpha_sq = 0.0;  // au^2
    Component component_used = Component::none;
};

// Radial integrals <v|alpha0|v'> and <v|alpha2|v'> over a set of levels.
struct AlphaMatrixElements {
    int n = 0;
    std::vector<double> iso;  // n x n row-major
    std::vector<double> traceless;

    double iso_at(int v, int vp) const { return iso[static_cast<std::size_t>(v * n + vp)]; }
    double traceless_at(int v, int vp) const { return traceless[static_cast<std::size_t>(v * n + vp)]; }
};

AlphaMatrixElements alpha_matrix_elements(const PolarizabilityModel& pm, const std::vector<VibrationalLevel>& levels);

// |alpha_{vJ -> v'J'}|^2. |dJ| = 2 uses the traceless integral. dJ = 0 between
// different states adds the iso and traceless intensities, both weighted by
// S(J->J). Elastic (from == to) is |alpha0|^2 + S |alpha2|^2.
TransitionStrength transition_strength(const AlphaMatrixElements& me, const RoVibState& from, const RoVibState& to);
TransitionStrength transition_strength(const PolarizabilityModel& pm, const std::vector<VibrationalLevel>& levels,
                                       const RoVibState& from, const RoVibState& to);

}  // namespace cavcool
