#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cavcool/io.hpp"
#include "cavcool/model.hpp"
#include "cavcool/optimize.hpp"
#include "cavcool/schedule.hpp"

namespace cavcool {

enum class ScheduleSource { top_down, greedy, evolutionary, file };

struct RunConfig {
    KeyValueFile source;  // values as read, after overrides

    std::filesystem::path molecule_file;
    std::optional<std::filesystem::path> pes_file;
    std::optional<std::filesystem::path> polarizability_file;
    std::optional<std::filesystem::path> branching_file;

    MoleculeSpec molecule;
    LaserSpec laser;
    CavitySpec cavity;
    ModelOptions model;

    // initial state
    double temperature_K = 300.0;
    bool degeneracy = true;
    std::optional<int> initial_vibrational;  // all population in this v, thermal in J
    // Thermal P(v, J) of another molecule copied into this basis.
    std::optional<std::filesystem::path> initial_reference_molecule;

    // schedule
    ScheduleSource schedule_source = ScheduleSource::top_down;
    std::optional<std::filesystem::path> schedule_file;
    double step_duration = 0.06;    // s
    double topdown_threshold = 1e-3;
    int repeat_count = 1;           // for generated schedules
    int sub_samples = 1;
    GreedyOptions greedy;
    EvolutionOptions evolution;
    std::optional<std::uint64_t> seed;

    // momentum model
    bool momentum_model = false;
    double motional_temperature_K = 1e-3;
    int momentum_cells_per_recoil = 4;
    double momentum_dt = 1e-3;  // s

    double regime_threshold = 10.0;
    bool regime_hard_fail = true;
    std::filesystem::path output_dir = "out";

    void validate() const;
};

// Keys are documented in the bundled defaults-*.cfg files. Relative paths
// resolve against the config file's directory, then the data directory.
RunConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});
RunConfig parse_config(const KeyValueFile& kv);
// "key=value" strings applied on top of a parsed file.
void apply_overrides(KeyValueFile& kv, const std::vector<std::string>& overrides);

// Named configs ("defaults-oh") map to data/<name>.cfg.
std::filesystem::path resolve_config_path(const std::string& name_or_path);

CoolingModel build_model(const RunConfig& cfg);
PopulationVector initial_populations(const RunConfig& cfg, const CoolingModel& model);
CoolingSchedule make_schedule(const RunConfig& cfg, const CoolingModel& model, const PopulationVector& p0);

// Config text that reproduces `cfg` when loaded (all values echoed).
std::string format_config(const RunConfig& cfg);

}  // namespace cavcool
