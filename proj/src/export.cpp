#include "cavcool/export.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "cavcool/momentum.hpp"

namespace cavcool {

RegimeReport schedule_regime(const CoolingModel& model, const CoolingSchedule& s, double threshold) {
    RegimeReport all;
    all.threshold = threshold;
    std::set<std::pair<double, double>> seen;
    std::set<std::string> labels;
    bool first = true;
    for (const auto& st : s.steps) {
        const auto set = resolve_step(st, model);
        if (!seen.insert({set.laser_offset, set.fsr.value_or(0.0)}).second) continue;
        RateOptions ro;
        ro.fsr_override = set.fsr;
        const auto rep = check_regime(model.rates(set.laser_offset, 0.0, ro), model.cavity(), model.laser(), threshold);
        if (first) {
            all.coupling_strength = rep.coupling_strength;
            all.coupling_ratio = rep.coupling_ratio;
            all.coupling_ok = rep.coupling_ok;
            first = false;
        }
        for (const auto& t : rep.driven)
            if (labels.insert(t.label + "@" + format_double(set.laser_offset)).second) all.driven.push_back(t);
    }
    all.cooling_ok = !all.driven.empty();
    for (const auto& t : all.driven) all.cooling_ok = all.cooling_ok && t.pass;
    return all;
}

namespace {

// Ekin at every trajectory sample from the momentum-resolved model.
std::vector<double> track_kinetic_energy(const RunConfig& cfg, const CoolingModel& model, const PopulationVector& p0,
                                         const CoolingSchedule& s) {
    const double mass = model.mass_kg();
    const double hbar_k = constants::hbar * model.laser().wavenumber();
    const auto grid = make_momentum_grid(mass, cfg.motional_temperature_K, hbar_k, cfg.momentum_cells_per_recoil);
    auto w = thermal_momentum(p0.p, grid, mass, cfg.motional_temperature_K);
    std::vector<double> ekin{w.kinetic_energy(mass)};
    std::map<std::pair<double, double>, MomentumRates> cache;
    for (int rep = 0; rep < s.repeat_count; ++rep)
        for (const auto& st : s.steps) {
            const auto set = resolve_step(st, model);
            const auto key = std::make_pair(set.laser_offset, set.fsr.value_or(0.0));
            auto it = cache.find(key);
            if (it == cache.end()) {
                RateOptions ro;
                ro.fsr_override = set.fsr;
                it = cache.emplace(key, momentum_rates(model, grid, set.laser_offset, ro)).first;
            }
            const double chunk = st.duration / cfg.sub_samples;
            const double dt_max = std::min(cfg.momentum_dt, it->second.max_total > 0 ? 0.1 / it->second.max_total : chunk);
            const int n = std::max(1, static_cast<int>(std::ceil(chunk / dt_max)));
            for (int sub = 0; sub < cfg.sub_samples; ++sub) {
                for (int k = 0; k < n; ++k) w = evolve_momentum(w, it->second, chunk / n, model.execution());
                ekin.push_back(w.kinetic_energy(mass));
            }
        }
    return ekin;
}

}  // namespace

RunResult simulate(const RunConfig& cfg, const CoolingModel& model, const PopulationVector& p0,
                   const CoolingSchedule& s) {
    RunResult r;
    r.schedule = s;
    RunOptions ro;
    ro.sub_samples = cfg.sub_samples;
    r.trajectory = run(s, model, p0, ro);
    if (cfg.momentum_model) r.trajectory.kinetic_energy = track_kinetic_energy(cfg, model, p0, s);
    r.regime = schedule_regime(model, s, cfg.regime_threshold);
    r.spectrum = fold(*model.basis(), model.cavity(), model.laser());
    for (const auto* l : stokes_collisions(r.spectrum, model.cavity().kappa))
        r.warnings.push_back("Stokes line " + l->label + " lies within 5 kappa of a cavity mode");
    r.figure_of_merit = figure_of_merit(r.trajectory);
    return r;
}

std::string manifest_text(const RunConfig& cfg, const std::string& command) {
    std::ostringstream os;
    os << "# cavcool run manifest\n";
    os << "# version = " << kVersion << "\n";
    os << "# command = " << command << "\n";
    os << "# seed = " << (cfg.seed ? std::to_string(*cfg.seed) : std::string("none")) << "\n";
    os << "# molecule = " << cfg.molecule.name << "\n";
    if (cfg.polarizability_file) os << "# polarizability_provenance = " << read_polarizability_file(*cfg.polarizability_file).provenance() << "\n";
    os << format_config(cfg);
    return os.str();
}

std::string export_rates(const RateTable& t) {
    std::ostringstream os;
    os << "# rate table\n";
    os << "# laser_offset_Hz = " << format_double(rad_s_to_hz(t.laser_offset)) << "\n";
    os << "# fsr_Hz = " << format_double(rad_s_to_hz(t.fsr)) << "\n";
    os << "# momentum_kg_m_s = " << format_double(t.momentum) << "\n";
    os << "from\tto\tspontaneous_s^-1\tcavity_plus_s^-1\tcavity_minus_s^-1\n";
    const auto& st = t.basis->states;
    for (std::size_t i = 0; i < t.n; ++i)
        for (std::size_t j = 0; j < t.n; ++j)
            os << st[i].label() << "\t" << st[j].label() << "\t" << format_double(t.spont(i, j)) << "\t"
               << format_double(t.cav_plus(i, j)) << "\t" << format_double(t.cav_minus(i, j)) << "\n";
    return os.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
    if (!out) throw Error("write failed for " + path.string());
}

void write_outputs(const std::filesystem::path& dir, const RunConfig& cfg, const std::string& command,
                   const RunResult* r) {
    std::filesystem::create_directories(dir);
    write_text(dir / "manifest.cfg", manifest_text(cfg, command));
    if (!r) return;
    const auto& t = r->trajectory;
    std::vector<std::string> header = {"trajectory " + (r->schedule.label.empty() ? std::string("schedule") : r->schedule.label),
                                       "molecule = " + cfg.molecule.name,
                                       "final_ground_fraction = " + format_double(t.ground_fraction(t.size() - 1)),
                                       "final_meanJ = " + format_double(t.mean_J(t.size() - 1)),
                                       "final_meanV = " + format_double(t.mean_v(t.size() - 1)),
                                       "figure_of_merit_Hz = " + format_double(r->figure_of_merit)};
    write_text(dir / "trajectory.tsv", export_trajectory(t, header));
    write_text(dir / "regime.txt", r->regime.text());
    write_text(dir / "spectrum.tsv", export_spectrum(r->spectrum, cfg.cavity.kappa));
    write_text(dir / "schedule.sched", format_schedule(r->schedule));
}

}  // namespace cavcool
