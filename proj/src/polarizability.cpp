#include "cavcool/polarizability.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "cavcool/io.hpp"

namespace cavcool {

namespace {

bool overlaps(const RadialWindow& a, const RadialWindow& b) { return a.r_lo < b.r_hi && b.r_lo < a.r_hi; }

void check_curve(const SampledCurve& c, const char* what) {
    if (c.r.size() != c.value.size()) throw Error(std::string(what) + ": R and value columns differ in length");
    if (c.r.size() < 8) throw Error(std::string(what) + ": need at least 8 samples");
    for (std::size_t i = 1; i < c.r.size(); ++i)
        if (!(c.r[i] > c.r[i - 1])) throw Error(std::string(what) + ": R must be strictly increasing");
}

}  // namespace

SampledCurve smooth_resonances(const SampledCurve& curve, const std::vector<RadialWindow>& windows,
                               const std::vector<RadialWindow>& protected_regions) {
    check_curve(curve, "smooth_resonances");
    SampledCurve out = curve;
    if (out.smoothed.size() != out.r.size()) out.smoothed.assign(out.r.size(), false);
    if (windows.empty()) return out;

    for (const auto& w : windows) {
        if (!(w.r_hi > w.r_lo)) throw Error("smoothing window must have r_hi > r_lo");
        for (const auto& p : protected_regions)
            if (overlaps(w, p))
                throw WindowCoversPhysicalRegion("smoothing window [" + format_double(w.r_lo) + ", " +
                                                 format_double(w.r_hi) + "] A overlaps a physical region [" +
                                                 format_double(p.r_lo) + ", " + format_double(p.r_hi) + "] A");
    }
    auto inside = [&](double r) {
        return std::any_of(windows.begin(), windows.end(), [r](const RadialWindow& w) { return r > w.r_lo && r < w.r_hi; });
    };

    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < curve.r.size(); ++i)
        if (!inside(curve.r[i])) {
            xs.push_back(curve.r[i]);
            ys.push_back(curve.value[i]);
        }
    if (xs.size() < 4) throw Error("smoothing windows leave fewer than 4 samples");
    const MonotoneCubic bridge(xs, ys);
    for (std::size_t i = 0; i < curve.r.size(); ++i)
        if (inside(curve.r[i])) {
            if (curve.r[i] < bridge.x_min() || curve.r[i] > bridge.x_max())
                throw Error("smoothing window touches the end of the curve; nothing to interpolate from");
            out.value[i] = bridge(curve.r[i]);
            out.smoothed[i] = true;
        }
    return out;
}

DynamicAlpha dynamic_alpha(const std::vector<ExcitedStateData>& states, double r, double omega_L, double guard) {
    DynamicAlpha a;
    for (const auto& s : states) {
        const double delta = omega_L - s.energy(r);
        const double delta2 = delta - 2.0 * omega_L;
        if (std::abs(delta) < guard || std::abs(delta2) < guard)
            throw NearResonance("state " + s.label + " is within the resonance guard band at R = " + format_double(r) +
                                " A");
        const double f = 1.0 / delta + 1.0 / delta2;
        const double dz = s.dipole_parallel ? s.dipole_parallel(r) : 0.0;
        const double dx = s.dipole_perpendicular ? s.dipole_perpendicular(r) : 0.0;
        a.zz += dz * dz * f;
        a.xx += dx * dx * f;
    }
    a.iso = (a.zz + 2.0 * a.xx) / 3.0;
    a.traceless = a.zz - a.iso;
    return a;
}

void PolarizabilityModel::build() {
    check_curve(iso_, "alpha0 curve");
    check_curve(traceless_, "alpha2 curve");
    if (iso_.r != traceless_.r) throw Error("alpha0 and alpha2 curves must share R samples");
    if (iso_.smoothed.size() != iso_.r.size()) iso_.smoothed.assign(iso_.r.size(), false);
    if (traceless_.smoothed.size() != traceless_.r.size()) traceless_.smoothed.assign(traceless_.r.size(), false);
    iso_spline_ = MonotoneCubic(iso_.r, iso_.value);
    traceless_spline_ = MonotoneCubic(traceless_.r, traceless_.value);
}

PolarizabilityModel PolarizabilityModel::from_curves(SampledCurve iso, SampledCurve traceless, double laser_frequency,
                                                     std::string provenance) {
    PolarizabilityModel m;
    m.source_ = Source::curve;
    m.iso_ = std::move(iso);
    m.traceless_ = std::move(traceless);
    m.laser_frequency_ = laser_frequency;
    m.provenance_ = std::move(provenance);
    m.build();
    return m;
}

PolarizabilityModel PolarizabilityModel::from_states(const std::vector<ExcitedStateData>& states,
                                                     const std::vector<double>& r, double omega_L_hartree,
                                                     const std::vector<RadialWindow>& windows, double guard) {
    // Samples inside a window are allowed to be resonant; they are filled in
    // by the smoothing pass.
    auto in_window = [&](double x) {
        return std::any_of(windows.begin(), windows.end(), [x](const RadialWindow& w) { return x > w.r_lo && x < w.r_hi; });
    };
    SampledCurve iso{r, std::vector<double>(r.size()), {}};
    SampledCurve tr{r, std::vector<double>(r.size()), {}};
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (in_window(r[i])) continue;
        const auto a = dynamic_alpha(states, r[i], omega_L_hartree, guard);
        iso.value[i] = a.iso;
        tr.value[i] = a.traceless;
    }
    PolarizabilityModel m;
    m.source_ = Source::sum_over_states;
    m.iso_ = smooth_resonances(iso, windows);
    m.traceless_ = smooth_resonances(tr, windows);
    m.laser_frequency_ = convert(omega_L_hartree, Unit::hartree, Unit::angular_frequency);
    m.provenance_ = "sum over states";
    m.windows_ = windows;
    m.build();
    return m;
}

PolarizabilityModel PolarizabilityModel::smoothed(const std::vector<RadialWindow>& windows,
                                                  const std::vector<RadialWindow>& protected_regions) const {
    PolarizabilityModel m = *this;
    m.iso_ = smooth_resonances(iso_, windows, protected_regions);
    m.traceless_ = smooth_resonances(traceless_, windows, protected_regions);
    m.windows_.insert(m.windows_.end(), windows.begin(), windows.end());
    m.build();
    return m;
}

PolarizabilityModel PolarizabilityModel::scaled(double factor) const {
    PolarizabilityModel m = *this;
    for (double& v : m.iso_.value) v *= factor;
    for (double& v : m.traceless_.value) v *= factor;
    m.provenance_ += " (scaled x" + format_double(factor) + ")";
    m.build();
    return m;
}

PolarizabilityModel PolarizabilityModel::shifted(double shift) const {
    PolarizabilityModel m = *this;
    for (double& r : m.iso_.r) r += shift;
    for (double& r : m.traceless_.r) r += shift;
    for (auto& w : m.windows_) {
        w.r_lo += shift;
        w.r_hi += shift;
    }
    m.provenance_ += " (shifted " + format_double(shift) + " A)";
    m.build();
    return m;
}

std::vector<double> PolarizabilityModel::sample_iso(const RadialGrid& g) const {
    std::vector<double> out(static_cast<std::size_t>(g.n_points));
    for (int i = 0; i < g.n_points; ++i) out[static_cast<std::size_t>(i)] = iso(g.point(i));
    return out;
}

std::vector<double> PolarizabilityModel::sample_traceless(const RadialGrid& g) const {
    std::vector<double> out(static_cast<std::size_t>(g.n_points));
    for (int i = 0; i < g.n_points; ++i) out[static_cast<std::size_t>(i)] = traceless(g.point(i));
    return out;
}

PolarizabilityModel read_polarizability_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open polarizability file " + path.string());
    SampledCurve iso, tr;
    double wavelength_nm = 0.0;
    std::string provenance = path.filename().string();
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) {
            const std::string meta = trim(line.substr(hash + 1));
            line.erase(hash);
            if (const auto eq = meta.find('='); eq != std::string::npos) {
                const std::string key = trim(meta.substr(0, eq));
                const std::string value = trim(meta.substr(eq + 1));
                if (key == "wavelength_nm") wavelength_nm = split_quantity(value, path.string()).first;
                if (key == "provenance") provenance = value;
            }
        }
        std::replace(line.begin(), line.end(), ',', ' ');
        std::replace(line.begin(), line.end(), ';', ' ');
        if (trim(line).empty()) continue;
        std::istringstream ss(line);
        double r, a0, a2;
        if (!(ss >> r >> a0 >> a2))
            throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": expected three columns R alpha0 alpha2");
        iso.r.push_back(r);
        iso.value.push_back(a0);
        tr.r.push_back(r);
        tr.value.push_back(a2);
    }
    const double omega =
        wavelength_nm > 0.0 ? 2.0 * constants::pi * constants::c / (wavelength_nm * 1e-9) : 0.0;
    try {
        return PolarizabilityModel::from_curves(std::move(iso), std::move(tr), omega, provenance);
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

double placzek_teller(int J, int Jp) {
    if (J < 0 || Jp < 0) return 0.0;
    const double j = J;
    if (Jp == J) {
        if (J == 0) return 0.0;
        return j * (j + 1.0) / ((2.0 * j - 1.0) * (2.0 * j + 3.0));
    }
    if (Jp == J + 2) return 3.0 * (j + 1.0) * (j + 2.0) / (2.0 * (2.0 * j + 1.0) * (2.0 * j + 3.0));
    if (Jp == J - 2) return 3.0 * j * (j - 1.0) / (2.0 * (2.0 * j + 1.0) * (2.0 * j - 1.0));
    return 0.0;
}

AlphaMatrixElements alpha_matrix_elements(const PolarizabilityModel& pm, const std::vector<VibrationalLevel>& levels) {
    AlphaMatrixElements me;
    if (levels.empty()) return me;
    const auto& grid = levels.front().grid;
    const auto a0 = pm.sample_iso(grid);
    const auto a2 = pm.sample_traceless(grid);
    me.n = static_cast<int>(levels.size());
    me.iso.assign(levels.size() * levels.size(), 0.0);
    me.traceless.assign(levels.size() * levels.size(), 0.0);
    for (std::size_t i = 0; i < levels.size(); ++i)
        for (std::size_t k = i; k < levels.size(); ++k) {
            const double x0 = matrix_element(a0, levels[i], levels[k]);
            const double x2 = matrix_element(a2, levels[i], levels[k]);
            me.iso[i * levels.size() + k] = me.iso[k * levels.size() + i] = x0;
            me.traceless[i * levels.size() + k] = me.traceless[k * levels.size() + i] = x2;
        }
    return me;
}

TransitionStrength transition_strength(const AlphaMatrixElements& me, const RoVibState& from, const RoVibState& to) {
    TransitionStrength t{from, to, 0.0, Component::none};
    if (from.ladder != to.ladder) return t;
    if (from.v >= me.n || to.v >= me.n) throw Error("transition_strength: vibrational level outside the matrix elements");
    const int dJ = to.J - from.J;
    const double a0 = me.iso_at(from.v, to.v);
    const double a2 = me.traceless_at(from.v, to.v);
    if (dJ == 2 || dJ == -2) {
        t.alpha_sq = a2 * a2 * placzek_teller(from.J, to.J);
        t.component_used = Component::traceless;
    } else if (dJ == 0) {
        const double s = placzek_teller(from.J, to.J);
        t.component_used = Component::both;
        if (from.v == to.v)
            t.alpha_sq = a0 * a0 + s * a2 * a2;
        else
            t.alpha_sq = (a0 * a0 + a2 * a2) * s;
    }
    return t;
}

TransitionStrength transition_strength(const PolarizabilityModel& pm, const std::vector<VibrationalLevel>& levels,
                                       const RoVibState& from, const RoVibState& to) {
    return transition_strength(alpha_matrix_elements(pm, levels), from, to);
}

}  // namespace cavcool
