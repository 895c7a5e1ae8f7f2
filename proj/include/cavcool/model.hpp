#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cavcool/kernels.hpp"
#include "cavcool/molecule.hpp"
#include "cavcool/polarizability.hpp"
#include "cavcool/rates.hpp"
#include "cavcool/vibrational.hpp"

namespace cavcool {

// Branching override: rows of (channel label "A:v2", final level label "v0", Gamma in s^-1).
struct BranchingOverride {
    std::string channel;
    std::string final_level;
    double rate = 0.0;
};
std::vector<BranchingOverride> read_branching_file(const std::filesystem::path& path);

struct ModelOptions {
    int v_max = 0;
    int J_max = 8;
    int grid_points = 512;
    int excited_levels = 8;  // v'' per excited state in the spontaneous sum
    std::optional<RadialGrid> grid;
    std::optional<PotentialCurve> ground_curve;  // tabulated PES override
    std::vector<RadialWindow> smoothing_windows;
    std::vector<BranchingOverride> branching;
    Execution execution = Execution::parallel;
};

struct RateOptions {
    bool cavity = true;
    bool spontaneous = true;
    std::optional<double> fsr_override;  // rad/s
};

// Everything the rate formulas need that does not depend on the laser
// detuning: basis, vibrational levels, |alpha|^2 between all basis states and
// the spontaneous-Raman channels. Immutable after build().
class CoolingModel {
public:
    static CoolingModel build(const MoleculeSpec& m, const PolarizabilityModel& pm, const LaserSpec& laser,
                              const CavitySpec& cav, const ModelOptions& opt);

    RateTable rates(double laser_offset, double momentum = 0.0, const RateOptions& ro = {}) const;
    // Lorentzian weights of every channel for state `from` at p.
    std::vector<LorentzianWeights> lorentzian_weights(std::size_t from, double laser_offset, double momentum = 0.0) const;

    const std::shared_ptr<const RoVibBasis>& basis() const { return basis_; }
    const std::vector<VibrationalLevel>& levels() const { return levels_; }
    const AlphaMatrixElements& alpha() const { return alpha_; }
    const std::vector<double>& strength() const { return strength_; }    // n x n, au^2
    const std::vector<double>& rot_factor() const { return rot_factor_; }
    // rabi_sq relative to Omega_L,0->0^2
    const std::vector<kernels::ExcitationChannel>& channels() const { return channels_; }
    const std::vector<std::string>& channel_labels() const { return channel_labels_; }
    const LaserSpec& laser() const { return laser_; }
    const CavitySpec& cavity() const { return cavity_; }
    const PolarizabilityModel& polarizability() const { return pm_; }
    const ModelOptions& options() const { return options_; }
    Execution execution() const { return options_.execution; }

    // Rebuilt copies with different couplings (basis and matrix elements shared).
    CoolingModel with_laser(const LaserSpec& l) const;
    CoolingModel with_cavity(const CavitySpec& c) const;

    double mass_kg() const;

private:
    kernels::RateKernelInput kernel_input(double omega_laser, double momentum, const RateOptions& ro,
                                          std::vector<double>& energies,
                                          std::vector<kernels::ExcitationChannel>& scaled) const;

    std::shared_ptr<const RoVibBasis> basis_;
    std::vector<VibrationalLevel> levels_;
    AlphaMatrixElements alpha_;
    std::vector<double> strength_;
    std::vector<double> rot_factor_;
    std::vector<kernels::ExcitationChannel> channels_;
    std::vector<std::string> channel_labels_;
    LaserSpec laser_;
    CavitySpec cavity_;
    PolarizabilityModel pm_;
    ModelOptions options_;
};

}  // namespace cavcool
