#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cavcool/dynamics.hpp"
#include "cavcool/model.hpp"
#include "cavcool/population.hpp"

namespace cavcool {

class NothingToCool : public Error {
public:
    using Error::Error;
};
class ScheduleError : public Error {
public:
    using Error::Error;
};

struct TransitionTarget {
    int v_from = 0;
    int v_to = 0;
    int J_from = 0;
    int J_to = 0;

    std::string label() const;  // "v1-0:J3-1"
    static std::optional<TransitionTarget> parse(const std::string& s);
    bool operator==(const TransitionTarget&) const = default;
};

struct ScheduleStep {
    std::optional<TransitionTarget> target;  // either a transition ...
    double offset = 0.0;                     // ... or an explicit laser offset, rad/s
    double duration = 0.0;                   // s
    std::optional<double> fsr_override;      // rad/s

    std::string target_text() const;  // label or offset in Hz
};

struct CoolingSchedule {
    std::vector<ScheduleStep> steps;
    int repeat_count = 1;
    std::string label;

    double total_duration() const;
    void validate() const;
};

// Line format: "step <label|offset_Hz> <duration_ms> [fsr_override_Hz]",
// "repeat <n>", "label <text>"; '#' comments.
CoolingSchedule parse_schedule(const std::string& text, const std::string& origin = "<string>");
CoolingSchedule read_schedule_file(const std::filesystem::path& path);
std::string format_schedule(const CoolingSchedule& s);

// Resolved laser setting of one step.
struct StepSetting {
    double laser_offset = 0.0;  // rad/s
    std::optional<double> fsr;  // rad/s
    int from = -1;              // basis indices of the target, -1 for offsets
    int to = -1;
};

// A transition target must be an allowed anti-Stokes line or a Rayleigh line;
// Rayleigh targets are red-detuned by kappa from the nearest mode.
StepSetting resolve_step(const ScheduleStep& step, const CoolingModel& model);

struct RunOptions {
    int sub_samples = 1;  // snapshots per step
    RateOptions rates;
};

PopulationTrajectory run(const CoolingSchedule& s, const CoolingModel& model, const PopulationVector& p0,
                         const RunOptions& opt = {});

// Allowed anti-Stokes transitions, optionally restricted to sources with P > min_population.
std::vector<std::pair<std::size_t, std::size_t>> anti_stokes_transitions(const RoVibBasis& b,
                                                                         const std::vector<double>* p = nullptr,
                                                                         double min_population = 0.0);

// Steps from the highest occupied (v, J) downward, one per occupied level above the ground pair.
CoolingSchedule top_down(const RoVibBasis& b, const PopulationVector& p, double threshold, double step_duration,
                         int repeat_count = 1);

// Objective minimised by the optimisers: <J> + w <v>.
double cooling_objective(const PopulationVector& p, double weight);

// Decrease rate of <J> in Hz: 1 / t where <J> - J_floor first drops to 1/e of
// its initial value (linear interpolation between samples). J_floor is the
// conserved odd-ladder population. Returns 0 if never reached.
double figure_of_merit(const PopulationTrajectory& t);
double figure_of_merit_v(const PopulationTrajectory& t);

std::filesystem::path data_directory();
std::filesystem::path builtin_schedule(const std::string& name);

}  // namespace cavcool
