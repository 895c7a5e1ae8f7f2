#include "cavcool/rates.hpp"

#include <cmath>
#include <sstream>

#include "cavcool/io.hpp"

namespace cavcool {

double LaserSpec::base_frequency() const { return 2.0 * constants::pi * constants::c / (wavelength_nm * 1e-9); }

double LaserSpec::wavenumber() const { return omega() / constants::c; }

void LaserSpec::validate(const std::array<double, 3>& axis) const {
    if (!(wavelength_nm > 0.0)) throw ConfigError("laser wavelength must be positive");
    if (rabi_reference < 0.0) throw ConfigError("laser Rabi frequency must be non-negative");
    const double dot = propagation[0] * axis[0] + propagation[1] * axis[1] + propagation[2] * axis[2];
    if (std::abs(dot) > 1e-12) throw ConfigError("laser must propagate perpendicular to the cavity axis");
}

void CavitySpec::validate() const {
    if (!(fsr > 0.0)) throw ConfigError("cavity FSR must be positive");
    if (!(kappa > 0.0)) throw ConfigError("cavity kappa must be positive");
    if (g_reference < 0.0) throw ConfigError("cavity coupling must be non-negative");
    if (!(reference_alpha > 0.0)) throw ConfigError("reference polarizability must be positive");
    if (fsr / (2.0 * kappa) <= 100.0)
        throw ConfigError("cavity FSR must exceed 2 kappa by more than a factor 100 (FSR/2kappa = " +
                          format_double(fsr / (2.0 * kappa)) + ")");
    if (mode_min > mode_max) throw ConfigError("cavity mode range is empty");
}

int CavitySpec::mode_halfwidth() const {
    // (kappa / delta)^2 > 1e-8  <=>  |delta| < 1e4 kappa
    return std::max(1, static_cast<int>(std::ceil(1e4 * kappa / fsr)));
}

LorentzianWeights lorentzian_weights(double rabi_sq, double detuning, double linewidth, double omega_L,
                                     double laser_doppler) {
    const double hw = 0.25 * linewidth * linewidth;
    const double dp = detuning + laser_doppler;
    const double dm = detuning - 2.0 * omega_L - laser_doppler;
    return {rabi_sq / (dp * dp + hw), rabi_sq / (dm * dm + hw)};
}

std::string transition_label(const RoVibState& from, const RoVibState& to) {
    return "v" + std::to_string(from.v) + "-" + std::to_string(to.v) + ":J" + std::to_string(from.J) + "-" +
           std::to_string(to.J);
}

RegimeReport check_regime(const RateTable& rates, const CavitySpec& cav, const LaserSpec& laser, double threshold) {
    RegimeReport rep;
    rep.threshold = threshold;
    const auto& states = rates.basis->states;
    const long double fsr = rates.fsr;
    const double window = 3.0 * cav.kappa;

    for (std::size_t i = 0; i < rates.n; ++i) {
        double spont_out = 0.0;
        for (std::size_t k = 0; k < rates.n; ++k) spont_out += rates.spont(i, k);
        for (std::size_t j = 0; j < rates.n; ++j) {
            if (i == j) continue;
            const double c = rates.cavity(i, j);
            if (c <= 0.0) continue;
            const long double emitted =
                static_cast<long double>(rates.omega_laser) + states[i].energy - static_cast<long double>(states[j].energy);
            const long long n = std::llround(emitted / fsr);
            if (n < cav.mode_min || n > cav.mode_max) continue;
            if (std::abs(static_cast<double>(emitted - n * fsr)) > window) continue;
            TransitionRegime t;
            t.from = i;
            t.to = j;
            t.label = transition_label(states[i], states[j]);
            t.cavity_rate = c;
            t.spontaneous_rate = spont_out;
            t.ratio = spont_out > 0.0 ? c / spont_out : std::numeric_limits<double>::infinity();
            t.pass = t.ratio > threshold;
            rep.driven.push_back(t);
        }
    }
    rep.cooling_ok = !rep.driven.empty();
    for (const auto& t : rep.driven) rep.cooling_ok = rep.cooling_ok && t.pass;

    rep.coupling_strength = laser.reference_detuning != 0.0
                                ? std::abs(cav.g_reference * laser.rabi_reference / laser.reference_detuning)
                                : std::numeric_limits<double>::infinity();
    rep.coupling_ratio = rep.coupling_strength > 0.0 ? cav.kappa / rep.coupling_strength
                                                     : std::numeric_limits<double>::infinity();
    rep.coupling_ok = rep.coupling_ratio > threshold;
    return rep;
}

std::string RegimeReport::text() const {
    std::ostringstream os;
    os << "# regime report\n";
    os << "threshold\t" << format_double(threshold) << "\n";
    os << "coupling_g_omega_over_delta_Hz\t" << format_double(rad_s_to_hz(coupling_strength)) << "\n";
    os << "kappa_over_g_omega_over_delta\t" << format_double(coupling_ratio) << "\t" << (coupling_ok ? "pass" : "fail")
       << "\n";
    os << "driven_lines\t" << driven.size() << "\n";
    os << "# transition\tgamma_cavity_s^-1\tgamma_spont_s^-1\tratio\tflag\n";
    for (const auto& t : driven)
        os << t.label << "\t" << format_double(t.cavity_rate) << "\t" << format_double(t.spontaneous_rate) << "\t"
           << format_double(t.ratio) << "\t" << (t.pass ? "pass" : "fail") << "\n";
    os << "cooling\t" << (cooling_ok ? "pass" : "fail") << "\n";
    os << "overall\t" << (ok() ? "pass" : "fail") << "\n";
    return os.str();
}

}  // namespace cavcool
