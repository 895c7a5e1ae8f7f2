#include "cavcool/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <regex>
#include <sstream>

#include "cavcool/io.hpp"
#include "cavcool/spectrum.hpp"

#ifndef CAVCOOL_SOURCE_DATA_DIR
#define CAVCOOL_SOURCE_DATA_DIR "data"
#endif

namespace cavcool {

std::string TransitionTarget::label() const {
    return "v" + std::to_string(v_from) + "-" + std::to_string(v_to) + ":J" + std::to_string(J_from) + "-" +
           std::to_string(J_to);
}

std::optional<TransitionTarget> TransitionTarget::parse(const std::string& s) {
    static const std::regex re(R"(v(\d+)-(\d+):J(\d+)-(\d+))");
    std::smatch m;
    if (!std::regex_match(s, m, re)) return std::nullopt;
    return TransitionTarget{std::stoi(m[1]), std::stoi(m[2]), std::stoi(m[3]), std::stoi(m[4])};
}

std::string ScheduleStep::target_text() const {
    return target ? target->label() : format_double(rad_s_to_hz(offset));
}

double CoolingSchedule::total_duration() const {
    double s = 0.0;
    for (const auto& st : steps) s += st.duration;
    return s * repeat_count;
}

void CoolingSchedule::validate() const {
    if (steps.empty()) throw ScheduleError("schedule has no steps");
    if (repeat_count < 1) throw ScheduleError("repeat count must be at least 1");
    for (const auto& st : steps)
        if (!(st.duration > 0.0)) throw ScheduleError("step durations must be positive");
}

CoolingSchedule parse_schedule(const std::string& text, const std::string& origin) {
    CoolingSchedule s;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    auto fail = [&](const std::string& msg) {
        throw ScheduleError(origin + ":" + std::to_string(lineno) + ": " + msg);
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string word;
        ss >> word;
        if (word == "label") {
            std::getline(ss, s.label);
            s.label = trim(s.label);
        } else if (word == "repeat") {
            if (!(ss >> s.repeat_count) || s.repeat_count < 1) fail("repeat needs a positive integer");
        } else if (word == "step") {
            std::string target, dur, fsr;
            ss >> target >> dur >> fsr;
            if (target.empty() || dur.empty()) fail("expected 'step <target> <duration_ms> [fsr_override_Hz]'");
            ScheduleStep st;
            st.target = TransitionTarget::parse(target);
            try {
                if (!st.target) st.offset = hz_to_rad_s(std::stod(target));
                st.duration = std::stod(dur) * 1e-3;
                if (!fsr.empty()) st.fsr_override = hz_to_rad_s(std::stod(fsr));
            } catch (const std::exception&) {
                fail("cannot parse step '" + line + "'");
            }
            if (!(st.duration > 0.0)) fail("step duration must be positive");
            std::string extra;
            if (ss >> extra) fail("unexpected trailing text '" + extra + "'");
            s.steps.push_back(st);
        } else {
            fail("unknown directive '" + word + "'");
        }
    }
    if (s.steps.empty()) throw ScheduleError(origin + ": schedule has no steps");
    return s;
}

CoolingSchedule read_schedule_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ScheduleError("cannot open schedule file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_schedule(ss.str(), path.string());
}

std::string format_schedule(const CoolingSchedule& s) {
    std::ostringstream os;
    if (!s.label.empty()) os << "label " << s.label << "\n";
    if (s.repeat_count != 1) os << "repeat " << s.repeat_count << "\n";
    for (const auto& st : s.steps) {
        os << "step " << st.target_text() << " " << format_double(st.duration * 1e3);
        if (st.fsr_override) os << " " << format_double(rad_s_to_hz(*st.fsr_override));
        os << "\n";
    }
    return os.str();
}

StepSetting resolve_step(const ScheduleStep& step, const CoolingModel& model) {
    StepSetting set;
    set.fsr = step.fsr_override;
    if (!step.target) {
        set.laser_offset = step.offset;
        return set;
    }
    const auto& b = *model.basis();
    const auto& t = *step.target;
    const int i = b.index_of(t.v_from, t.J_from);
    const int j = b.index_of(t.v_to, t.J_to);
    if (i < 0 || j < 0) throw ForbiddenTransition("transition " + t.label() + " is outside the basis");
    const auto& a = b.states[static_cast<std::size_t>(i)];
    const auto& c = b.states[static_cast<std::size_t>(j)];
    if (!raman_allowed(a, c)) throw ForbiddenTransition("transition " + t.label() + " is not Raman allowed");
    if (i != j && !(a.energy > c.energy)) throw ForbiddenTransition("transition " + t.label() + " is not anti-Stokes");
    set.from = i;
    set.to = j;
    set.laser_offset = detuning_for(b, static_cast<std::size_t>(i), static_cast<std::size_t>(j), model.cavity(),
                                    model.laser(), step.fsr_override);
    if (i == j) set.laser_offset -= model.cavity().kappa;
    return set;
}

PopulationTrajectory run(const CoolingSchedule& s, const CoolingModel& model, const PopulationVector& p0,
                         const RunOptions& opt) {
    s.validate();
    if (opt.sub_samples < 1) throw ScheduleError("sub_samples must be at least 1");
    if (p0.basis != model.basis() && p0.p.size() != model.basis()->size())
        throw ScheduleError("initial populations do not match the basis");

    PopulationTrajectory traj;
    traj.basis = model.basis();
    PopulationVector p = p0;
    p.basis = model.basis();
    traj.append(p, "initial");

    // Propagators are cached per distinct (offset, fsr, duration) so repeated
    // cycles cost one matrix exponential per distinct step.
    std::map<std::tuple<double, double, double>, Propagator> cache;
    std::vector<StepSetting> settings;
    for (const auto& st : s.steps) settings.push_back(resolve_step(st, model));

    for (int rep = 0; rep < s.repeat_count; ++rep)
        for (std::size_t k = 0; k < s.steps.size(); ++k) {
            const auto& st = s.steps[k];
            const auto& set = settings[k];
            const double dt = st.duration / opt.sub_samples;
            const auto key = std::make_tuple(set.laser_offset, set.fsr.value_or(0.0), dt);
            auto it = cache.find(key);
            if (it == cache.end()) {
                RateOptions ro = opt.rates;
                if (set.fsr) ro.fsr_override = set.fsr;
                const auto m = generator(model.rates(set.laser_offset, 0.0, ro));
                check_generator(m);
                it = cache.emplace(key, Propagator(m, dt)).first;
            }
            for (int sub = 0; sub < opt.sub_samples; ++sub) {
                it->second.apply(p);
                traj.append(p, st.target_text());
            }
        }
    return traj;
}

std::vector<std::pair<std::size_t, std::size_t>> anti_stokes_transitions(const RoVibBasis& b, const std::vector<double>* p,
                                                                         double min_population) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t i = 0; i < b.size(); ++i) {
        if (p && (*p)[i] <= min_population) continue;
        for (std::size_t j = 0; j < b.size(); ++j) {
            if (i == j || !raman_allowed(b.states[i], b.states[j])) continue;
            if (b.states[i].energy > b.states[j].energy) out.emplace_back(i, j);
        }
    }
    return out;
}

CoolingSchedule top_down(const RoVibBasis& b, const PopulationVector& p, double threshold, double step_duration,
                         int repeat_count) {
    if (!(threshold > 0.0 && threshold < 1.0)) throw ScheduleError("top_down threshold must lie in (0, 1)");
    std::vector<std::size_t> occupied;
    for (std::size_t i = 0; i < b.size(); ++i) {
        const auto& s = b.states[i];
        if (p.p[i] > threshold && !(s.v == 0 && s.J <= 1)) occupied.push_back(i);
    }
    if (occupied.empty()) throw NothingToCool("all population is already in v = 0, J in {0, 1}");
    std::sort(occupied.begin(), occupied.end(), [&](std::size_t x, std::size_t y) {
        const auto& a = b.states[x];
        const auto& c = b.states[y];
        return a.v != c.v ? a.v > c.v : a.J > c.J;
    });

    CoolingSchedule s;
    s.label = "top-down";
    s.repeat_count = repeat_count;
    for (std::size_t i : occupied) {
        const auto& a = b.states[i];
        TransitionTarget t{a.v, a.v, a.J, a.J - 2};
        if (a.v > 0) {
            t.v_to = a.v - 1;
            t.J_to = a.J >= 2 ? a.J - 2 : a.J == 1 ? 1 : 2;
        }
        const int j = b.index_of(t.v_to, t.J_to);
        if (j < 0 || !raman_allowed(a, b.states[static_cast<std::size_t>(j)])) continue;
        ScheduleStep st;
        st.target = t;
        st.duration = step_duration;
        s.steps.push_back(st);
    }
    if (s.steps.empty()) throw NothingToCool("no anti-Stokes transition leaves the occupied levels");
    return s;
}

double cooling_objective(const PopulationVector& p, double weight) { return p.mean_J() + weight * p.mean_v(); }

namespace {

double one_over_e_rate(const std::vector<double>& t, const std::vector<double>& x, double floor) {
    if (t.size() < 2) return 0.0;
    const double x0 = x.front() - floor;
    if (!(x0 > 0.0)) return 0.0;
    const double target = x0 / std::exp(1.0);
    for (std::size_t k = 1; k < t.size(); ++k) {
        const double a = x[k - 1] - floor;
        const double c = x[k] - floor;
        if (c <= target) {
            const double f = a == c ? 1.0 : (a - target) / (a - c);
            const double tt = t[k - 1] + f * (t[k] - t[k - 1]) - t.front();
            return tt > 0.0 ? 1.0 / tt : 0.0;
        }
    }
    return 0.0;
}

}  // namespace

double figure_of_merit(const PopulationTrajectory& t) {
    std::vector<double> j;
    for (std::size_t k = 0; k < t.size(); ++k) j.push_back(t.mean_J(k));
    return one_over_e_rate(t.times, j, t.at(0).odd_fraction());
}

double figure_of_merit_v(const PopulationTrajectory& t) {
    std::vector<double> v;
    for (std::size_t k = 0; k < t.size(); ++k) v.push_back(t.mean_v(k));
    return one_over_e_rate(t.times, v, 0.0);
}

std::filesystem::path data_directory() {
    if (const char* env = std::getenv("CAVCOOL_DATA_DIR"); env && *env) return env;
    return CAVCOOL_SOURCE_DATA_DIR;
}

std::filesystem::path builtin_schedule(const std::string& name) {
    return data_directory() / "schedules" / (name + ".sched");
}

}  // namespace cavcool
