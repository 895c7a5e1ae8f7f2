#include "cavcool/config.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace cavcool {

namespace {

std::filesystem::path resolve_file(const KeyValueFile& kv, const std::string& key) {
    const std::filesystem::path p = kv.raw(key);
    if (p.is_absolute()) {
        if (!std::filesystem::exists(p)) throw ConfigError(key + ": file not found: " + p.string());
        return p;
    }
    const auto local = kv.directory() / p;
    if (std::filesystem::exists(local)) return std::filesystem::absolute(local).lexically_normal();
    const auto shipped = data_directory() / p;
    if (std::filesystem::exists(shipped)) return std::filesystem::absolute(shipped).lexically_normal();
    throw ConfigError(key + ": file not found: " + local.string());
}

std::optional<std::filesystem::path> optional_file(const KeyValueFile& kv, const std::string& key) {
    if (!kv.has(key) || trim(kv.raw(key)).empty() || kv.raw(key) == "none") return std::nullopt;
    return resolve_file(kv, key);
}

std::vector<RadialWindow> parse_windows(const std::string& text) {
    // "1.5-1.8, 2.6-2.9" in A
    std::vector<RadialWindow> out;
    for (const auto& item : split(text, ',')) {
        const std::string s = trim(item);
        if (s.empty()) continue;
        const auto dash = s.find('-', 1);
        if (dash == std::string::npos) throw ConfigError("smoothing_windows: expected 'lo-hi' pairs, got '" + s + "'");
        try {
            out.push_back({std::stod(s.substr(0, dash)), std::stod(s.substr(dash + 1))});
        } catch (const std::exception&) {
            throw ConfigError("smoothing_windows: cannot parse '" + s + "'");
        }
    }
    return out;
}

std::array<double, 3> parse_vector(const KeyValueFile& kv, const std::string& key, std::array<double, 3> fallback) {
    if (!kv.has(key)) return fallback;
    const auto parts = split(kv.raw(key), ',');
    if (parts.size() != 3) throw ConfigError(key + ": expected three comma-separated components");
    std::array<double, 3> v{};
    try {
        for (int i = 0; i < 3; ++i) v[static_cast<std::size_t>(i)] = std::stod(parts[static_cast<std::size_t>(i)]);
    } catch (const std::exception&) {
        throw ConfigError(key + ": cannot parse '" + kv.raw(key) + "'");
    }
    return v;
}

std::string vector_text(const std::array<double, 3>& v) {
    return format_double(v[0]) + ", " + format_double(v[1]) + ", " + format_double(v[2]);
}

}  // namespace

void RunConfig::validate() const {
    if (model.v_max < 0 || model.J_max < 0) throw ConfigError("v_max and J_max must be non-negative");
    if (temperature_K < 0.0) throw ConfigError("temperature_K must be non-negative");
    if (initial_vibrational && (*initial_vibrational < 0 || *initial_vibrational > model.v_max))
        throw ConfigError("initial_vibrational must lie in [0, v_max]");
    if (!(step_duration > 0.0)) throw ConfigError("step_duration_ms must be positive");
    if (greedy.horizon_steps < 1) throw ConfigError("horizon_steps must be at least 1");
    if (evolution.population_size < 2) throw ConfigError("population_size must be at least 2");
    if (evolution.generations < 0) throw ConfigError("generations must be non-negative");
    if (sub_samples < 1) throw ConfigError("sub_samples must be at least 1");
    if (repeat_count < 1) throw ConfigError("repeat must be at least 1");
    if (schedule_source == ScheduleSource::evolutionary && !seed)
        throw ConfigError("schedule = evolutionary needs a seed");
    if (momentum_model && !(motional_temperature_K > 0.0))
        throw ConfigError("momentum_model needs motional_temperature_K > 0");
    cavity.validate();
    laser.validate(cavity.axis);
}

void apply_overrides(KeyValueFile& kv, const std::vector<std::string>& overrides) {
    for (const auto& o : overrides) {
        const auto eq = o.find('=');
        if (eq == std::string::npos) throw ConfigError("override '" + o + "' is not of the form key=value");
        kv.set(trim(o.substr(0, eq)), trim(o.substr(eq + 1)));
    }
}

std::filesystem::path resolve_config_path(const std::string& name_or_path) {
    std::filesystem::path p = name_or_path;
    if (std::filesystem::exists(p)) return p;
    if (p.extension().empty() && p.parent_path().empty()) {
        const auto shipped = data_directory() / (name_or_path + ".cfg");
        if (std::filesystem::exists(shipped)) return shipped;
    }
    const auto shipped = data_directory() / p;
    if (std::filesystem::exists(shipped)) return shipped;
    throw ConfigError("config file not found: " + name_or_path);
}

RunConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
    auto kv = KeyValueFile::load(resolve_config_path(path.string()));
    apply_overrides(kv, overrides);
    return parse_config(kv);
}

RunConfig parse_config(const KeyValueFile& kv) {
    static const std::vector<std::string> known = {
        "molecule", "pes_file", "polarizability_file", "branching_file", "v_max", "J_max", "grid_points",
        "n_excited_levels", "smoothing_windows", "execution", "temperature_K", "degeneracy", "initial_vibrational",
        "initial_reference_molecule", "laser_wavelength_nm", "laser_rabi_reference_GHz", "laser_detuning_offset_Hz",
        "reference_detuning_THz", "reference_polarizability_au", "laser_propagation", "laser_polarization",
        "cavity_length_cm", "cavity_fsr_GHz", "cavity_kappa_kHz", "cavity_g_kHz", "cavity_waist_um",
        "cavity_mode_min", "cavity_mode_max", "cavity_axis", "schedule", "step_duration_ms", "topdown_threshold",
        "repeat", "sub_samples", "greedy_weight", "greedy_policy", "horizon_steps", "min_population", "generations",
        "population_size", "elite", "mutation_rate", "seed", "momentum_model", "motional_temperature_K",
        "momentum_cells_per_recoil", "momentum_dt_ms", "regime_threshold", "regime_hard_fail", "output_dir"};
    for (const auto& key : kv.keys())
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw ConfigError(kv.origin() + ": unknown key '" + key + "'");

    RunConfig c;
    c.source = kv;
    if (!kv.has("molecule")) throw ConfigError(kv.origin() + ": missing required key 'molecule'");
    c.molecule_file = resolve_file(kv, "molecule");
    c.molecule = read_molecule_file(c.molecule_file);
    c.pes_file = optional_file(kv, "pes_file");
    c.polarizability_file = optional_file(kv, "polarizability_file");
    c.branching_file = optional_file(kv, "branching_file");

    c.model.v_max = kv.integer_or("v_max", 0);
    c.model.J_max = kv.integer_or("J_max", 8);
    c.model.grid_points = kv.integer_or("grid_points", 512);
    c.model.excited_levels = kv.integer_or("n_excited_levels", 8);
    if (kv.has("smoothing_windows")) c.model.smoothing_windows = parse_windows(kv.raw("smoothing_windows"));
    const std::string ex = kv.get_or("execution", "parallel");
    if (ex != "parallel" && ex != "serial") throw ConfigError("execution must be 'parallel' or 'serial'");
    c.model.execution = ex == "serial" ? Execution::serial : Execution::parallel;
    if (c.pes_file) c.model.ground_curve = read_pes_file(c.pes_file->string());
    if (c.branching_file) c.model.branching = read_branching_file(*c.branching_file);

    c.temperature_K = kv.number_or("temperature_K", 300.0);
    c.degeneracy = kv.flag_or("degeneracy", true);
    if (kv.has("initial_vibrational")) c.initial_vibrational = kv.integer("initial_vibrational");
    c.initial_reference_molecule = optional_file(kv, "initial_reference_molecule");

    c.laser.wavelength_nm = kv.number_or("laser_wavelength_nm", 532.0);
    c.laser.rabi_reference = hz_to_rad_s(kv.number_or("laser_rabi_reference_GHz", 69.0) * 1e9);
    c.laser.detuning_offset = hz_to_rad_s(kv.number_or("laser_detuning_offset_Hz", 0.0));
    c.laser.reference_detuning = hz_to_rad_s(kv.number_or("reference_detuning_THz", -407.0) * 1e12);
    c.laser.propagation = parse_vector(kv, "laser_propagation", c.laser.propagation);
    c.laser.polarization = kv.get_or("laser_polarization", "linear");

    c.cavity.length_cm = kv.number_or("cavity_length_cm", 1.0);
    c.cavity.fsr = kv.has("cavity_fsr_GHz")
                       ? hz_to_rad_s(kv.number("cavity_fsr_GHz") * 1e9)
                       : hz_to_rad_s(constants::c / (2.0 * c.cavity.length_cm * 1e-2));
    c.cavity.kappa = hz_to_rad_s(kv.number_or("cavity_kappa_kHz", 75.0) * 1e3);
    c.cavity.g_reference = hz_to_rad_s(kv.number_or("cavity_g_kHz", 116.0) * 1e3);
    c.cavity.waist_um = kv.number_or("cavity_waist_um", 0.0);
    c.cavity.reference_alpha = kv.number_or("reference_polarizability_au", 1.0);
    if (kv.has("cavity_mode_min")) c.cavity.mode_min = std::stoll(kv.raw("cavity_mode_min"));
    if (kv.has("cavity_mode_max")) c.cavity.mode_max = std::stoll(kv.raw("cavity_mode_max"));
    c.cavity.axis = parse_vector(kv, "cavity_axis", c.cavity.axis);

    const std::string sched = kv.get_or("schedule", "topdown");
    if (sched == "topdown" || sched == "top_down") {
        c.schedule_source = ScheduleSource::top_down;
    } else if (sched == "greedy") {
        c.schedule_source = ScheduleSource::greedy;
    } else if (sched == "evolutionary") {
        c.schedule_source = ScheduleSource::evolutionary;
    } else {
        c.schedule_source = ScheduleSource::file;
        const std::filesystem::path p = sched;
        const auto named = builtin_schedule(sched);
        if (p.parent_path().empty() && p.extension().empty() && std::filesystem::exists(named))
            c.schedule_file = named;
        else
            c.schedule_file = resolve_file(kv, "schedule");
    }
    c.step_duration = kv.number_or("step_duration_ms", 60.0) * 1e-3;
    c.topdown_threshold = kv.number_or("topdown_threshold", 1e-3);
    c.repeat_count = kv.integer_or("repeat", 1);
    c.sub_samples = kv.integer_or("sub_samples", 1);

    c.greedy.horizon_steps = kv.integer_or("horizon_steps", 42);
    c.greedy.step_duration = c.step_duration;
    c.greedy.weight = kv.number_or("greedy_weight", 2.0);
    c.greedy.min_population = kv.number_or("min_population", 1e-6);
    const std::string policy = kv.get_or("greedy_policy", "combined");
    if (policy == "combined")
        c.greedy.policy = GreedyPolicy::combined;
    else if (policy == "rotational_first")
        c.greedy.policy = GreedyPolicy::rotational_first;
    else
        throw ConfigError("greedy_policy must be 'combined' or 'rotational_first'");

    c.evolution.horizon_steps = c.greedy.horizon_steps;
    c.evolution.step_duration = c.step_duration;
    c.evolution.weight = c.greedy.weight;
    c.evolution.generations = kv.integer_or("generations", 50);
    c.evolution.population_size = kv.integer_or("population_size", 24);
    c.evolution.elite = kv.integer_or("elite", 2);
    c.evolution.mutation_rate = kv.number_or("mutation_rate", 0.3);
    if (kv.has("seed")) {
        const std::string text = trim(kv.raw("seed"));
        std::size_t used = 0;
        try {
            // stoull would wrap a leading minus sign
            if (text.empty() || text[0] == '-') throw std::invalid_argument("negative");
            c.seed = std::stoull(text, &used);
        } catch (const std::exception&) {
            throw ConfigError("seed must be a non-negative integer");
        }
        if (used != text.size()) throw ConfigError("seed must be a non-negative integer");
        c.evolution.seed = *c.seed;
    }

    c.momentum_model = kv.flag_or("momentum_model", false);
    c.motional_temperature_K = kv.number_or("motional_temperature_K", 1e-3);
    c.momentum_cells_per_recoil = kv.integer_or("momentum_cells_per_recoil", 4);
    c.momentum_dt = kv.number_or("momentum_dt_ms", 1.0) * 1e-3;
    c.regime_threshold = kv.number_or("regime_threshold", 10.0);
    c.regime_hard_fail = kv.flag_or("regime_hard_fail", true);
    c.output_dir = kv.get_or("output_dir", "out");
    c.validate();
    return c;
}

CoolingModel build_model(const RunConfig& cfg) {
    PolarizabilityModel pm;
    if (cfg.polarizability_file) {
        pm = read_polarizability_file(*cfg.polarizability_file);
    } else {
        throw ConfigError("polarizability_file is required (no ab initio alpha(R) is bundled for " +
                          cfg.molecule.name + ")");
    }
    return CoolingModel::build(cfg.molecule, pm, cfg.laser, cfg.cavity, cfg.model);
}

PopulationVector initial_populations(const RunConfig& cfg, const CoolingModel& model) {
    const auto& basis = model.basis();
    PopulationVector p;
    p.basis = basis;
    if (cfg.initial_reference_molecule) {
        // Same (v, J) distribution as the reference molecule at this temperature.
        const auto ref = read_molecule_file(*cfg.initial_reference_molecule);
        const auto rb = std::make_shared<const RoVibBasis>(build_basis(ref, basis->v_max, basis->J_max));
        const auto rp = boltzmann_populations(rb, cfg.temperature_K, cfg.degeneracy);
        p.p.assign(basis->size(), 0.0);
        for (std::size_t i = 0; i < rb->size(); ++i) {
            const int k = basis->index_of(rb->states[i].v, rb->states[i].J);
            if (k >= 0) p.p[static_cast<std::size_t>(k)] = rp.p[i];
        }
        double s = 0.0;
        for (double x : p.p) s += x;
        for (double& x : p.p) x /= s;
        return p;
    }
    if (cfg.initial_vibrational) {
        p.p = rotational_thermal_in_v(*basis, *cfg.initial_vibrational, cfg.temperature_K, cfg.degeneracy);
        return p;
    }
    return boltzmann_populations(basis, cfg.temperature_K, cfg.degeneracy);
}

CoolingSchedule make_schedule(const RunConfig& cfg, const CoolingModel& model, const PopulationVector& p0) {
    switch (cfg.schedule_source) {
        case ScheduleSource::top_down:
            return top_down(*model.basis(), p0, cfg.topdown_threshold, cfg.step_duration, cfg.repeat_count);
        case ScheduleSource::greedy:
            return greedy_optimize(model, p0, cfg.greedy);
        case ScheduleSource::evolutionary: {
            EvolutionOptions eo = cfg.evolution;
            eo.seeds.push_back(greedy_optimize(model, p0, cfg.greedy));
            try {
                eo.seeds.push_back(top_down(*model.basis(), p0, cfg.topdown_threshold, cfg.step_duration));
            } catch (const NothingToCool&) {
            }
            return evolutionary_optimize(model, p0, eo).best;
        }
        case ScheduleSource::file:
            return read_schedule_file(*cfg.schedule_file);
    }
    throw ConfigError("unknown schedule source");
}

std::string format_config(const RunConfig& c) {
    std::ostringstream os;
    auto kv = [&](const std::string& k, const std::string& v) { os << k << " = " << v << "\n"; };
    auto num = [&](const std::string& k, double v) { kv(k, format_double(v)); };
    kv("molecule", c.molecule_file.string());
    if (c.pes_file) kv("pes_file", c.pes_file->string());
    if (c.polarizability_file) kv("polarizability_file", c.polarizability_file->string());
    if (c.branching_file) kv("branching_file", c.branching_file->string());
    kv("v_max", std::to_string(c.model.v_max));
    kv("J_max", std::to_string(c.model.J_max));
    kv("grid_points", std::to_string(c.model.grid_points));
    kv("n_excited_levels", std::to_string(c.model.excited_levels));
    if (!c.model.smoothing_windows.empty()) {
        std::string w;
        for (const auto& win : c.model.smoothing_windows)
            w += (w.empty() ? "" : ", ") + format_double(win.r_lo) + "-" + format_double(win.r_hi);
        kv("smoothing_windows", w);
    }
    kv("execution", c.model.execution == Execution::serial ? "serial" : "parallel");
    num("temperature_K", c.temperature_K);
    kv("degeneracy", c.degeneracy ? "true" : "false");
    if (c.initial_vibrational) kv("initial_vibrational", std::to_string(*c.initial_vibrational));
    if (c.initial_reference_molecule) kv("initial_reference_molecule", c.initial_reference_molecule->string());
    num("laser_wavelength_nm", c.laser.wavelength_nm);
    num("laser_rabi_reference_GHz", rad_s_to_hz(c.laser.rabi_reference) * 1e-9);
    num("laser_detuning_offset_Hz", rad_s_to_hz(c.laser.detuning_offset));
    num("reference_detuning_THz", rad_s_to_hz(c.laser.reference_detuning) * 1e-12);
    num("reference_polarizability_au", c.cavity.reference_alpha);
    kv("laser_propagation", vector_text(c.laser.propagation));
    kv("laser_polarization", c.laser.polarization);
    num("cavity_length_cm", c.cavity.length_cm);
    num("cavity_fsr_GHz", rad_s_to_hz(c.cavity.fsr) * 1e-9);
    num("cavity_kappa_kHz", rad_s_to_hz(c.cavity.kappa) * 1e-3);
    num("cavity_g_kHz", rad_s_to_hz(c.cavity.g_reference) * 1e-3);
    num("cavity_waist_um", c.cavity.waist_um);
    kv("cavity_mode_min", std::to_string(c.cavity.mode_min));
    kv("cavity_mode_max", std::to_string(c.cavity.mode_max));
    kv("cavity_axis", vector_text(c.cavity.axis));
    switch (c.schedule_source) {
        case ScheduleSource::top_down: kv("schedule", "topdown"); break;
        case ScheduleSource::greedy: kv("schedule", "greedy"); break;
        case ScheduleSource::evolutionary: kv("schedule", "evolutionary"); break;
        case ScheduleSource::file: kv("schedule", c.schedule_file->string()); break;
    }
    num("step_duration_ms", c.step_duration * 1e3);
    num("topdown_threshold", c.topdown_threshold);
    kv("repeat", std::to_string(c.repeat_count));
    kv("sub_samples", std::to_string(c.sub_samples));
    num("greedy_weight", c.greedy.weight);
    kv("greedy_policy", c.greedy.policy == GreedyPolicy::combined ? "combined" : "rotational_first");
    kv("horizon_steps", std::to_string(c.greedy.horizon_steps));
    num("min_population", c.greedy.min_population);
    kv("generations", std::to_string(c.evolution.generations));
    kv("population_size", std::to_string(c.evolution.population_size));
    kv("elite", std::to_string(c.evolution.elite));
    num("mutation_rate", c.evolution.mutation_rate);
    if (c.seed) kv("seed", std::to_string(*c.seed));
    kv("momentum_model", c.momentum_model ? "true" : "false");
    num("motional_temperature_K", c.motional_temperature_K);
    kv("momentum_cells_per_recoil", std::to_string(c.momentum_cells_per_recoil));
    num("momentum_dt_ms", c.momentum_dt * 1e3);
    num("regime_threshold", c.regime_threshold);
    kv("regime_hard_fail", c.regime_hard_fail ? "true" : "false");
    return os.str();
}

}  // namespace cavcool
