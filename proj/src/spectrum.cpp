#include "cavcool/spectrum.hpp"

#include <cmath>
#include <sstream>

#include "cavcool/io.hpp"
#include "cavcool/polarizability.hpp"

namespace cavcool {

const char* to_string(LineKind k) {
    switch (k) {
        case LineKind::stokes: return "stokes";
        case LineKind::anti_stokes: return "anti-stokes";
        case LineKind::rayleigh: return "rayleigh";
    }
    return "?";
}

std::vector<const SpectrumLine*> ReducedSpectrum::of_kind(LineKind k) const {
    std::vector<const SpectrumLine*> out;
    for (const auto& l : lines)
        if (l.kind == k) out.push_back(&l);
    return out;
}

const SpectrumLine* ReducedSpectrum::find(const std::string& label) const {
    for (const auto& l : lines)
        if (l.label == label) return &l;
    return nullptr;
}

bool raman_allowed(const RoVibState& a, const RoVibState& b) {
    if (a.ladder != b.ladder) return false;
    const int dJ = b.J - a.J;
    if (dJ != 0 && dJ != 2 && dJ != -2) return false;
    if (a.v == b.v && a.J == b.J) return true;
    return placzek_teller(a.J, b.J) > 0.0;
}

double fold_frequency(long double x, double fsr) {
    const long double f = fsr;
    long double r = std::fmod(x, f);
    if (r < 0) r += f;
    if (r >= f) r -= f;
    return static_cast<double>(r);
}

ReducedSpectrum fold(const RoVibBasis& basis, const CavitySpec& cav, const LaserSpec& laser,
                     std::optional<double> fsr_override) {
    if (basis.states.empty()) throw EmptyBasis("cannot fold the spectrum of an empty basis");
    ReducedSpectrum s;
    s.fsr = fsr_override ? *fsr_override : cav.fsr;
    s.omega_laser = laser.omega();
    s.laser_offset = laser.detuning_offset;
    const auto& st = basis.states;
    for (std::size_t i = 0; i < st.size(); ++i)
        for (std::size_t j = 0; j < st.size(); ++j) {
            if (!raman_allowed(st[i], st[j])) continue;
            SpectrumLine l;
            l.from = i;
            l.to = j;
            l.from_state = st[i];
            l.to_state = st[j];
            const long double shift = static_cast<long double>(st[i].energy) - st[j].energy;
            l.absolute_shift = static_cast<double>(shift);
            l.kind = i == j ? LineKind::rayleigh : shift > 0 ? LineKind::anti_stokes : LineKind::stokes;
            l.folded_offset = fold_frequency(static_cast<long double>(s.omega_laser) + shift, s.fsr);
            l.label = transition_label(st[i], st[j]);
            s.lines.push_back(l);
        }
    return s;
}

namespace {

double smallest_offset(long double base_plus_shift, double fsr) {
    const double r = fold_frequency(base_plus_shift, fsr);
    const double up = fsr - r;  // +offset reaching the next mode
    if (r == 0.0) return 0.0;
    return (r <= up) ? -r : up;
}

}  // namespace

double detuning_for(const RoVibBasis& basis, std::size_t from, std::size_t to, const CavitySpec& cav,
                    const LaserSpec& laser, std::optional<double> fsr_override) {
    if (from >= basis.size() || to >= basis.size()) throw ForbiddenTransition("state index outside the basis");
    const auto& a = basis.states[from];
    const auto& b = basis.states[to];
    if (!raman_allowed(a, b)) throw ForbiddenTransition("transition " + transition_label(a, b) + " is not Raman allowed");
    const double fsr = fsr_override ? *fsr_override : cav.fsr;
    const long double emitted =
        static_cast<long double>(laser.base_frequency()) + static_cast<long double>(a.energy) - b.energy;
    return smallest_offset(emitted, fsr);
}

FsrSolution tune_fsr_for_pair(const RoVibBasis& basis, std::size_t from1, std::size_t to1, std::size_t from2,
                              std::size_t to2, const CavitySpec& cav, const LaserSpec& laser, double tolerance) {
    const auto& st = basis.states;
    if (from1 >= st.size() || to1 >= st.size() || from2 >= st.size() || to2 >= st.size())
        throw ForbiddenTransition("state index outside the basis");
    if (!raman_allowed(st[from1], st[to1]) || !raman_allowed(st[from2], st[to2]))
        throw ForbiddenTransition("FSR tuning needs two Raman allowed transitions");
    if (from1 == from2 && to1 == to2) throw Error("FSR tuning needs two different transitions");

    const long double s1 = static_cast<long double>(st[from1].energy) - st[to1].energy;
    const long double s2 = static_cast<long double>(st[from2].energy) - st[to2].energy;
    const long double gap = std::abs(s1 - s2);
    const double lo = cav.fsr * 0.995;
    const double hi = cav.fsr * 1.005;

    auto residual = [&](long double f) {
        const long double m = std::llround(gap / f);
        return static_cast<double>(std::abs(gap - m * f));
    };
    auto solution = [&](double f) {
        FsrSolution s;
        s.fsr = f;
        const long double emitted = static_cast<long double>(laser.base_frequency()) + s1;
        s.laser_offset = smallest_offset(emitted, f);
        s.residual = residual(f);
        return s;
    };

    if (residual(cav.fsr) <= tolerance) return solution(cav.fsr);

    // Scan at kappa/10 for candidate neighbourhoods, then refine each one to
    // the exact commensurate value gap / m.
    const double step = cav.kappa / 10.0;
    std::optional<FsrSolution> best;
    long long last_m = -1;
    const auto n_steps = static_cast<long long>(std::ceil((hi - lo) / step));
    for (long long k = 0; k <= n_steps; ++k) {
        const double f = std::min(hi, lo + k * step);
        const long long m = std::llround(gap / f);
        if (m < 1 || m == last_m) continue;
        if (residual(f) > 0.5 * f) continue;
        last_m = m;
        const double exact = static_cast<double>(gap / m);
        if (exact < lo || exact > hi) continue;
        const auto s = solution(exact);
        if (s.residual > tolerance) continue;
        if (!best || std::abs(exact - cav.fsr) < std::abs(best->fsr - cav.fsr)) best = s;
    }
    if (!best)
        throw NoSolutionInRange("no FSR within +-0.5% of nominal puts " + transition_label(st[from1], st[to1]) + " and " +
                                transition_label(st[from2], st[to2]) + " on cavity modes");
    return *best;
}

std::vector<const SpectrumLine*> stokes_collisions(const ReducedSpectrum& s, double kappa, double width_kappa) {
    std::vector<const SpectrumLine*> out;
    for (const auto& l : s.lines) {
        if (l.kind != LineKind::stokes) continue;
        const double d = std::min(l.folded_offset, s.fsr - l.folded_offset);
        if (d < width_kappa * kappa) out.push_back(&l);
    }
    return out;
}

std::string export_spectrum(const ReducedSpectrum& s, double kappa) {
    std::ostringstream os;
    os << "# reduced spectrum\n";
    os << "# fsr_Hz = " << format_double(rad_s_to_hz(s.fsr)) << "\n";
    os << "# laser_offset_Hz = " << format_double(rad_s_to_hz(s.laser_offset)) << "\n";
    os << "# kappa_Hz = " << format_double(rad_s_to_hz(kappa)) << "\n";
    os << "label\tkind\tfrom\tto\tshift_Hz\tfolded_offset_Hz\tmode_detuning_Hz\n";
    for (const auto& l : s.lines) {
        // signed distance to the nearest comb mode
        const double d = l.folded_offset <= 0.5 * s.fsr ? l.folded_offset : l.folded_offset - s.fsr;
        os << l.label << "\t" << to_string(l.kind) << "\t" << l.from_state.label() << "\t" << l.to_state.label() << "\t"
           << format_double(rad_s_to_hz(l.absolute_shift)) << "\t" << format_double(rad_s_to_hz(l.folded_offset))
           << "\t" << format_double(rad_s_to_hz(d)) << "\n";
    }
    return os.str();
}

}  // namespace cavcool
