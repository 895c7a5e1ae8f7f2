#include "cavcool/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "cavcool/io.hpp"

namespace cavcool {

std::vector<BranchingOverride> read_branching_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open branching file " + path.string());
    std::vector<BranchingOverride> rows;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::replace(line.begin(), line.end(), ',', ' ');
        std::replace(line.begin(), line.end(), '\t', ' ');
        if (trim(line).empty()) continue;
        std::istringstream ss(line);
        BranchingOverride b;
        if (!(ss >> b.channel >> b.final_level >> b.rate) || b.rate < 0.0)
            throw ConfigError(path.string() + ":" + std::to_string(lineno) +
                              ": expected '<channel> <final level> <rate s^-1>'");
        rows.push_back(b);
    }
    return rows;
}

namespace {

// Parabola with the harmonic frequency omega_e, tabulated densely over g.
PotentialCurve harmonic_curve(double omega_e, double mu, double r_e, const RadialGrid& g) {
    const double f = constants::kinetic_cm1_A2 / mu;
    const double k = omega_e * omega_e / (4.0 * f);
    std::vector<double> r, v;
    const int n = 4 * g.n_points;
    for (int i = 0; i < n; ++i) {
        const double x = g.r_min + (g.r_max - g.r_min) * i / (n - 1);
        r.push_back(x);
        v.push_back(k * (x - r_e) * (x - r_e));
    }
    return PotentialCurve::tabulated(r, v);
}

// R range where V(R) <= E for the highest level.
RadialWindow allowed_region(const PotentialCurve& curve, const VibrationalLevel& top) {
    RadialWindow w{top.grid.r_max, top.grid.r_min};
    for (int i = 0; i < top.grid.n_points; ++i) {
        const double r = top.grid.point(i);
        if (curve(r) <= top.energy) {
            w.r_lo = std::min(w.r_lo, r);
            w.r_hi = std::max(w.r_hi, r);
        }
    }
    return w;
}

}  // namespace

CoolingModel CoolingModel::build(const MoleculeSpec& m, const PolarizabilityModel& pm, const LaserSpec& laser,
                                 const CavitySpec& cav, const ModelOptions& opt) {
    m.validate();
    cav.validate();
    laser.validate(cav.axis);
    if (opt.v_max < 0 || opt.J_max < 0) throw EmptyBasis("basis needs v_max >= 0 and J_max >= 0");
    if (opt.excited_levels < 1) throw ConfigError("excited_levels must be at least 1");

    CoolingModel cm;
    cm.laser_ = laser;
    cm.cavity_ = cav;
    cm.options_ = opt;

    const int n_grid_levels = std::max(opt.v_max, opt.excited_levels - 1);
    const RadialGrid grid = opt.grid ? *opt.grid : default_grid(m, n_grid_levels, opt.grid_points);
    grid.validate(m.r_e);

    PotentialCurve ground = opt.ground_curve ? *opt.ground_curve
                            : m.omega_e_x_e
                                ? PotentialCurve::morse(MorseParams::from_spectroscopic(m.omega_e, *m.omega_e_x_e,
                                                                                         m.reduced_mass, m.r_e))
                                : harmonic_curve(m.omega_e, m.reduced_mass, m.r_e, grid);
    cm.levels_ = solve_levels(ground, m.reduced_mass, grid, opt.v_max + 1, opt.execution);

    std::vector<double> vib;
    for (const auto& l : cm.levels_) vib.push_back(l.energy);
    cm.basis_ = std::make_shared<const RoVibBasis>(build_basis(m, opt.v_max, opt.J_max, vib));
    const auto& basis = *cm.basis_;
    const std::size_t n = basis.size();

    // Smoothing may not touch r_e or the classically allowed region of any basis level.
    RadialWindow physical = allowed_region(ground, cm.levels_.back());
    physical.r_lo = std::min(physical.r_lo, m.r_e);
    physical.r_hi = std::max(physical.r_hi, m.r_e);
    cm.pm_ = opt.smoothing_windows.empty() ? pm : pm.smoothed(opt.smoothing_windows, {physical});

    cm.alpha_ = alpha_matrix_elements(cm.pm_, cm.levels_);
    cm.strength_.assign(n * n, 0.0);
    cm.rot_factor_.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const auto& a = basis.states[i];
            const auto& b = basis.states[j];
            cm.strength_[i * n + j] = transition_strength(cm.alpha_, a, b).alpha_sq;
            if (i != j && a.ladder == b.ladder) cm.rot_factor_[i * n + j] = placzek_teller(a.J, b.J);
        }

    // Spontaneous channels: one per (excited state, v''), Franck-Condon weighted.
    // rabi_sq is stored relative to Omega_L,0->0^2 and scaled per rate build.
    for (const auto& e : m.excited_states) {
        const bool has_vib = e.omega_e > 0.0 && e.omega_e_x_e > 0.0 && e.r_e > 0.0;
        std::vector<VibrationalLevel> upper;
        if (has_vib) {
            const auto curve = PotentialCurve::morse(
                MorseParams::from_spectroscopic(e.omega_e, e.omega_e_x_e, m.reduced_mass, e.r_e));
            upper = solve_levels(curve, m.reduced_mass, grid, opt.excited_levels, opt.execution);
        }
        const int n_upper = has_vib ? opt.excited_levels : 1;
        // q[v][v'']
        std::vector<std::vector<double>> q(static_cast<std::size_t>(opt.v_max + 1),
                                           std::vector<double>(static_cast<std::size_t>(n_upper), 1.0));
        if (has_vib)
            for (int v = 0; v <= opt.v_max; ++v)
                for (int u = 0; u < n_upper; ++u) {
                    const double o = overlap(cm.levels_[static_cast<std::size_t>(v)], upper[static_cast<std::size_t>(u)]);
                    q[static_cast<std::size_t>(v)][static_cast<std::size_t>(u)] = o * o;
                }
        const double q_ref = q[0][0] > 0.0 ? q[0][0] : 1.0;

        for (int u = 0; u < n_upper; ++u) {
            kernels::ExcitationChannel ch;
            const double e_upper = has_vib ? upper[static_cast<std::size_t>(u)].energy : 0.0;
            ch.energy = wavenumber_to_rad_s(e.T_e + e_upper);
            ch.linewidth = e.linewidth;
            ch.rabi_sq.resize(n);
            ch.branching.resize(n);
            double q_sum = 0.0;
            for (int v = 0; v <= opt.v_max; ++v) q_sum += q[static_cast<std::size_t>(v)][static_cast<std::size_t>(u)];
            const std::string label = e.label + ":v" + std::to_string(u);
            for (std::size_t i = 0; i < n; ++i) {
                const int v = basis.states[i].v;
                const double qv = q[static_cast<std::size_t>(v)][static_cast<std::size_t>(u)];
                ch.rabi_sq[i] = e.rabi_scale * qv / q_ref;
                ch.branching[i] = q_sum > 0.0 ? e.linewidth * qv / q_sum : 0.0;
                for (const auto& o : opt.branching)
                    if (o.channel == label && o.final_level == "v" + std::to_string(v)) ch.branching[i] = o.rate;
            }
            cm.channels_.push_back(std::move(ch));
            cm.channel_labels_.push_back(label);
        }
    }
    return cm;
}

double CoolingModel::mass_kg() const { return basis_->molecule.total_mass * constants::amu; }

kernels::RateKernelInput CoolingModel::kernel_input(double omega_laser, double momentum, const RateOptions& ro,
                                                    std::vector<double>& energies,
                                                    std::vector<kernels::ExcitationChannel>& scaled) const {
    const auto& states = basis_->states;
    energies.resize(states.size());
    for (std::size_t i = 0; i < states.size(); ++i) energies[i] = basis_->zero_point + states[i].energy;

    kernels::RateKernelInput in;
    in.n_states = states.size();
    in.energy = energies;
    in.strength = strength_;
    in.rot_factor = rot_factor_;
    if (ro.spontaneous) {
        const double omega_ref_sq = laser_.rabi_reference * laser_.rabi_reference;
        scaled = channels_;
        for (auto& ch : scaled)
            for (double& x : ch.rabi_sq) x *= omega_ref_sq;
        in.channels = scaled;
    }
    in.omega_laser = omega_laser;

    const double mass = mass_kg();
    const auto& prop = laser_.propagation;
    const auto& axis = cavity_.axis;
    const double along = prop[0] * axis[0] + prop[1] * axis[1] + prop[2] * axis[2];
    in.laser_doppler = omega_laser / constants::c * along * momentum / mass;
    in.cavity_doppler = omega_laser / constants::c * momentum / mass;

    in.kappa = cavity_.kappa;
    in.fsr = ro.fsr_override ? *ro.fsr_override : cavity_.fsr;
    in.mode_min = cavity_.mode_min;
    in.mode_max = cavity_.mode_max;
    in.mode_halfwidth = std::max(1, static_cast<int>(std::ceil(1e4 * cavity_.kappa / in.fsr)));
    if (ro.cavity) {
        // |g+-|^2 = |g|^2 / 4 for the two running-wave components of the standing wave
        const double g_sq = 0.25 * cavity_.g_reference * cavity_.g_reference;
        in.cavity_prefactor = 2.0 * cavity_.kappa * g_sq / (cavity_.reference_alpha * cavity_.reference_alpha);
        const double width = channels_.empty() ? 0.0 : channels_.front().linewidth;
        const auto w = cavcool::lorentzian_weights(laser_.rabi_reference * laser_.rabi_reference, laser_.reference_detuning,
                                          width, laser_.base_frequency());
        in.gamma_plus_ref = w.plus;
        in.gamma_minus_ref = w.minus;
    }
    return in;
}

RateTable CoolingModel::rates(double laser_offset, double momentum, const RateOptions& ro) const {
    const double omega_laser = laser_.base_frequency() + laser_offset;
    std::vector<double> energies;
    std::vector<kernels::ExcitationChannel> scaled;
    const auto in = kernel_input(omega_laser, momentum, ro, energies, scaled);

    RateTable t;
    t.basis = basis_;
    t.n = basis_->size();
    t.spontaneous.assign(t.n * t.n, 0.0);
    t.cavity_plus.assign(t.n * t.n, 0.0);
    t.cavity_minus.assign(t.n * t.n, 0.0);
    t.momentum = momentum;
    t.laser_offset = laser_offset;
    t.omega_laser = omega_laser;
    t.fsr = in.fsr;
    kernels::rate_table(in, {t.spontaneous, t.cavity_plus, t.cavity_minus}, options_.execution);
    return t;
}

std::vector<LorentzianWeights> CoolingModel::lorentzian_weights(std::size_t from, double laser_offset,
                                                                double momentum) const {
    const double omega_laser = laser_.base_frequency() + laser_offset;
    std::vector<double> energies;
    std::vector<kernels::ExcitationChannel> scaled;
    const auto in = kernel_input(omega_laser, momentum, RateOptions{}, energies, scaled);
    std::vector<LorentzianWeights> out;
    for (const auto& ch : scaled)
        out.push_back(cavcool::lorentzian_weights(ch.rabi_sq[from], energies[from] - ch.energy + omega_laser,
                                                  ch.linewidth, omega_laser, in.laser_doppler));
    return out;
}

CoolingModel CoolingModel::with_laser(const LaserSpec& l) const {
    l.validate(cavity_.axis);
    CoolingModel c = *this;
    c.laser_ = l;
    return c;
}

CoolingModel CoolingModel::with_cavity(const CavitySpec& cav) const {
    cav.validate();
    CoolingModel c = *this;
    c.cavity_ = cav;
    return c;
}

}  // namespace cavcool
