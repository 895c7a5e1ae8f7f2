#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "cavcool/config.hpp"
#include "cavcool/spectrum.hpp"

namespace cavcool {

inline constexpr const char* kVersion = "1.0.0";

struct RunResult {
    CoolingSchedule schedule;
    PopulationTrajectory trajectory;
    RegimeReport regime;
    ReducedSpectrum spectrum;
    double figure_of_merit = 0.0;  // Hz
    std::vector<std::string> warnings;
};

// Driven lines of every distinct laser setting in the schedule, one report.
RegimeReport schedule_regime(const CoolingModel& model, const CoolingSchedule& s, double threshold);

// Runs the schedule; with the momentum model on, Ekin is tracked on a
// momentum grid alongside the exact internal-state propagation.
RunResult simulate(const RunConfig& cfg, const CoolingModel& model, const PopulationVector& p0,
                   const CoolingSchedule& s);

// Echo of every input as a loadable config, preceded by '#' metadata.
std::string manifest_text(const RunConfig& cfg, const std::string& command);

std::string export_rates(const RateTable& t);

// Writes manifest.cfg, and when `r` is given trajectory.tsv, regime.txt,
// spectrum.tsv and schedule.sched into `dir`.
void write_outputs(const std::filesystem::path& dir, const RunConfig& cfg, const std::string& command,
                   const RunResult* r);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace cavcool
