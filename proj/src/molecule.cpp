#include "cavcool/molecule.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cavcool/io.hpp"
#include "cavcool/population.hpp"

namespace cavcool {

void MoleculeSpec::validate() const {
    if (!(B_e > 0.0)) throw ConfigError(name + ": B_e must be positive");
    if (!(omega_e > 0.0)) throw ConfigError(name + ": omega_e must be positive");
    if (!(reduced_mass > 0.0)) throw ConfigError(name + ": reduced_mass must be positive");
    if (!(total_mass > 0.0)) throw ConfigError(name + ": total_mass must be positive");
    if (omega_e_x_e && !(*omega_e_x_e > 0.0)) throw ConfigError(name + ": omega_e_x_e must be positive");
    if (!(r_e > 0.0)) throw ConfigError(name + ": r_e must be positive");
    for (const auto& e : excited_states) {
        if (!(e.linewidth > 0.0)) throw ConfigError(name + ": excited state " + e.label + " needs a linewidth > 0");
        if (!(e.T_e > 0.0)) throw ConfigError(name + ": excited state " + e.label + " needs T_e > 0");
    }
}

double MoleculeSpec::rotational_constant(int v) const {
    const double x = v + 0.5;
    return B_e + B_ex1 * x + B_ex2 * x * x;
}

namespace {

const char* kExcitedPrefix = "excited_state.";

MoleculeSpec molecule_from(const KeyValueFile& kv) {
    const std::string& origin = kv.origin();
    MoleculeSpec m;
    m.name = kv.get_or("name", "unnamed");
    m.reduced_mass = kv.quantity("reduced_mass", Unit::amu);
    m.total_mass = kv.quantity("total_mass", Unit::amu);
    m.B_e = kv.quantity("B_e", Unit::wavenumber);
    m.B_ex1 = kv.quantity_or("B_ex1", Unit::wavenumber, 0.0);
    m.B_ex2 = kv.quantity_or("B_ex2", Unit::wavenumber, 0.0);
    m.D_J = kv.quantity_or("D_J", Unit::wavenumber, 0.0);
    m.omega_e = kv.quantity("omega_e", Unit::wavenumber);
    if (kv.has("omega_e_x_e")) m.omega_e_x_e = kv.quantity("omega_e_x_e", Unit::wavenumber);
    m.r_e = kv.quantity("r_e", Unit::angstrom);
    m.ground_state_label = kv.get_or("ground_state_label", "X");
    m.spin_orbit_splitting = kv.quantity_or("spin_orbit_splitting", Unit::wavenumber, 0.0);

    // excited_state.<label>.<field> = value
    std::vector<std::string> labels;
    for (const auto& key : kv.keys()) {
        if (key.rfind(kExcitedPrefix, 0) != 0) continue;
        const std::string rest = key.substr(std::string(kExcitedPrefix).size());
        const auto dot = rest.find('.');
        if (dot == std::string::npos) throw ConfigError(origin + ": malformed key '" + key + "'");
        const std::string label = rest.substr(0, dot);
        if (std::find(labels.begin(), labels.end(), label) == labels.end()) labels.push_back(label);
    }
    for (const auto& label : labels) {
        const std::string p = std::string(kExcitedPrefix) + label + ".";
        ExcitedState e;
        e.label = label;
        e.T_e = kv.quantity(p + "T_e", Unit::wavenumber);
        e.linewidth = kv.quantity(p + "linewidth", Unit::angular_frequency);
        e.omega_e = kv.quantity_or(p + "omega_e", Unit::wavenumber, 0.0);
        e.omega_e_x_e = kv.quantity_or(p + "omega_e_x_e", Unit::wavenumber, 0.0);
        e.r_e = kv.quantity_or(p + "r_e", Unit::angstrom, 0.0);
        e.rabi_scale = kv.number_or(p + "rabi_scale", 1.0);
        m.excited_states.push_back(e);
    }
    m.validate();
    return m;
}

}  // namespace

MoleculeSpec parse_molecule(const std::string& text, const std::string& origin) {
    return molecule_from(KeyValueFile::parse(text, origin));
}

MoleculeSpec read_molecule_file(const std::filesystem::path& path) {
    return molecule_from(KeyValueFile::load(path));
}

std::string RoVibState::label() const { return "v" + std::to_string(v) + ":J" + std::to_string(J); }

int RoVibBasis::index_of(int v, int J) const {
    if (v < 0 || J < 0 || v > v_max || J > J_max) return -1;
    return v * (J_max + 1) + J;
}

double rotational_energy(const MoleculeSpec& m, int v, int J) {
    const double jj = static_cast<double>(J) * (J + 1);
    return wavenumber_to_rad_s(m.rotational_constant(v) * jj - m.D_J * jj * jj);
}

namespace {

struct CurveExtent {
    double inner;
    double outer;
};

CurveExtent morse_extent(double omega_e, double wexe, double mu, double r_e, int n_levels) {
    const double x0 = std::sqrt(constants::kinetic_cm1_A2 / (mu * omega_e));
    const double top = n_levels + 0.5;
    if (wexe <= 0.0) {
        const double turn = x0 * std::sqrt(2.0 * top);
        return {r_e - turn - 6.0 * x0, r_e + turn + 6.0 * x0};
    }
    const auto p = MorseParams::from_spectroscopic(omega_e, wexe, mu, r_e);
    const double e = std::min(omega_e * top - wexe * top * top, 0.95 * p.well_depth);
    const double s = std::sqrt(e / p.well_depth);
    return {r_e - std::log(1.0 + s) / p.range - 5.0 * x0, r_e - std::log(1.0 - s) / p.range + 12.0 * x0};
}

}  // namespace

RadialGrid default_grid(const MoleculeSpec& m, int v_max, int n_points) {
    const int n = v_max + 1;
    auto ext = morse_extent(m.omega_e, m.omega_e_x_e.value_or(0.0), m.reduced_mass, m.r_e, n);
    for (const auto& e : m.excited_states) {
        if (e.omega_e <= 0.0 || e.r_e <= 0.0) continue;
        const auto x = morse_extent(e.omega_e, e.omega_e_x_e, m.reduced_mass, e.r_e, n);
        ext.inner = std::min(ext.inner, x.inner);
        ext.outer = std::max(ext.outer, x.outer);
    }
    RadialGrid g;
    g.r_min = std::max(0.15, ext.inner);
    g.r_max = ext.outer;
    g.n_points = n_points;
    return g;
}

std::vector<double> default_vibrational_energies(const MoleculeSpec& m, int v_max) {
    std::vector<double> e(static_cast<std::size_t>(v_max + 1));
    if (!m.omega_e_x_e) {
        for (int v = 0; v <= v_max; ++v) e[static_cast<std::size_t>(v)] = m.omega_e * (v + 0.5);
        return e;
    }
    const auto curve =
        PotentialCurve::morse(MorseParams::from_spectroscopic(m.omega_e, *m.omega_e_x_e, m.reduced_mass, m.r_e));
    const auto levels = solve_levels(curve, m.reduced_mass, default_grid(m, v_max), v_max + 1);
    for (int v = 0; v <= v_max; ++v) e[static_cast<std::size_t>(v)] = levels[static_cast<std::size_t>(v)].energy;
    return e;
}

RoVibBasis build_basis(const MoleculeSpec& m, int v_max, int J_max, std::vector<double> vib) {
    if (v_max < 0 || J_max < 0) throw Error("v_max and J_max must be non-negative");
    if (static_cast<int>(vib.size()) < v_max + 1) throw Error("not enough vibrational energies for v_max");
    vib.resize(static_cast<std::size_t>(v_max + 1));
    RoVibBasis b;
    b.molecule = m;
    b.v_max = v_max;
    b.J_max = J_max;
    b.vibrational_energy = vib;
    b.zero_point = wavenumber_to_rad_s(vib[0]);
    for (int v = 0; v <= v_max; ++v) {
        const double e_vib = wavenumber_to_rad_s(vib[static_cast<std::size_t>(v)] - vib[0]);
        for (int J = 0; J <= J_max; ++J) {
            RoVibState s;
            s.v = v;
            s.J = J;
            s.ladder = (J % 2 == 0) ? Ladder::even : Ladder::odd;
            s.energy = e_vib + rotational_energy(m, v, J) - rotational_energy(m, 0, 0);
            b.states.push_back(s);
        }
    }
    return b;
}

RoVibBasis build_basis(const MoleculeSpec& m, int v_max, int J_max) {
    return build_basis(m, v_max, J_max, default_vibrational_energies(m, v_max));
}

namespace {

std::vector<double> thermal(const RoVibBasis& b, double T, bool degeneracy, auto&& include) {
    if (b.states.empty()) throw EmptyBasis("basis has no states");
    if (T < 0.0) throw Error("temperature must be non-negative");
    std::vector<double> w(b.size(), 0.0);
    double e_min = std::numeric_limits<double>::infinity();
    for (const auto& s : b.states)
        if (include(s)) e_min = std::min(e_min, s.energy);
    if (!std::isfinite(e_min)) throw EmptyBasis("no states selected for the thermal distribution");

    if (T == 0.0) {
        for (std::size_t i = 0; i < b.size(); ++i)
            if (include(b.states[i]) && b.states[i].energy == e_min) w[i] = 1.0;
    } else {
        const double kT = convert(T, Unit::kelvin, Unit::angular_frequency);
        for (std::size_t i = 0; i < b.size(); ++i) {
            const auto& s = b.states[i];
            if (!include(s)) continue;
            const double g = degeneracy ? 2.0 * s.J + 1.0 : 1.0;
            w[i] = g * std::exp(-(s.energy - e_min) / kT);
        }
    }
    double sum = 0.0;
    for (double x : w) sum += x;
    for (double& x : w) x /= sum;
    return w;
}

}  // namespace

std::vector<double> boltzmann_weights(const RoVibBasis& b, double T, bool degeneracy) {
    return thermal(b, T, degeneracy, [](const RoVibState&) { return true; });
}

std::vector<double> rotational_thermal_in_v(const RoVibBasis& b, int v, double T, bool degeneracy) {
    return thermal(b, T, degeneracy, [v](const RoVibState& s) { return s.v == v; });
}

PopulationVector boltzmann_populations(std::shared_ptr<const RoVibBasis> b, double T, bool degeneracy) {
    if (!b) throw EmptyBasis("null basis");
    PopulationVector pv;
    pv.p = boltzmann_weights(*b, T, degeneracy);
    pv.basis = std::move(b);
    return pv;
}

double PopulationVector::total() const {
    double s = 0.0;
    for (double x : p) s += x;
    return s;
}

double PopulationVector::mean_J() const {
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) s += p[i] * basis->states[i].J;
    return s;
}

double PopulationVector::mean_v() const {
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) s += p[i] * basis->states[i].v;
    return s;
}

double PopulationVector::ground_fraction() const {
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i)
        if (basis->states[i].v == 0 && basis->states[i].J <= 1) s += p[i];
    return s;
}

double PopulationVector::odd_fraction() const {
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i)
        if (basis->states[i].ladder == Ladder::odd) s += p[i];
    return s;
}

double PopulationVector::at(int v, int J) const {
    const int i = basis->index_of(v, J);
    return i < 0 ? 0.0 : p[static_cast<std::size_t>(i)];
}

}  // namespace cavcool
