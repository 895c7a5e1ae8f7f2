#include "cavcool/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace cavcool::kernels {

double cavity_pair_rate(const RateKernelInput& in, std::size_t from, std::size_t to, int direction) {
    const double s = in.strength[from * in.n_states + to];
    if (s <= 0.0 || in.cavity_prefactor <= 0.0) return 0.0;

    // Mode frequencies are n * FSR with absolute mode numbers n; the
    // subtraction runs in long double so detunings keep sub-Hz precision.
    const long double shift = static_cast<long double>(in.energy[from]) - in.energy[to];
    const long double emitted = static_cast<long double>(in.omega_laser) + shift;
    const long double anti = shift - static_cast<long double>(in.omega_laser);
    const long double fsr = in.fsr;
    const long long nearest = std::llround(emitted / fsr);
    const long long lo = std::max(in.mode_min, nearest - in.mode_halfwidth);
    const long long hi = std::min(in.mode_max, nearest + in.mode_halfwidth);
    const double doppler = direction * in.cavity_doppler;
    const double k2 = in.kappa * in.kappa;

    double sum = 0.0;
    for (long long n = lo; n <= hi; ++n) {
        const long double mode = static_cast<long double>(n) * fsr;
        const double dplus = static_cast<double>(emitted - mode) + doppler;
        const double dminus = static_cast<double>(anti - mode) + doppler;
        sum += in.gamma_plus_ref / (dplus * dplus + k2) + in.gamma_minus_ref / (dminus * dminus + k2);
    }
    return in.cavity_prefactor * s * sum;
}

double spontaneous_pair_rate(const RateKernelInput& in, std::size_t from, std::size_t to) {
    if (from == to) return 0.0;
    const double rot = in.rot_factor[from * in.n_states + to];
    if (rot <= 0.0) return 0.0;
    double sum = 0.0;
    for (const auto& ch : in.channels) {
        const double branch = ch.branching[to];
        const double omega_sq = ch.rabi_sq[from];
        if (branch <= 0.0 || omega_sq <= 0.0) continue;
        const double detuning = in.energy[from] - ch.energy + in.omega_laser;
        const double half_width_sq = 0.25 * ch.linewidth * ch.linewidth;
        const double dp = detuning + in.laser_doppler;
        const double dm = detuning - 2.0 * in.omega_laser - in.laser_doppler;
        sum += branch * (omega_sq / (dp * dp + half_width_sq) + omega_sq / (dm * dm + half_width_sq));
    }
    return rot * sum;
}

double momentum_cell(const MomentumKernelInput& in, std::size_t state, std::size_t k) {
    const std::size_t ns = in.n_states;
    const std::size_t np = in.n_p;
    const auto shift = static_cast<std::size_t>(in.shift);
    auto rate = [&](std::size_t p, std::size_t from, std::size_t to, std::size_t dir) {
        return in.rates[((p * ns + from) * ns + to) * 2 + dir];
    };
    auto w = [&](std::size_t s, std::size_t p) { return in.weight[s * np + p]; };

    double loss = 0.0;
    for (std::size_t to = 0; to < ns; ++to) loss += rate(k, state, to, 0) + rate(k, state, to, 1);

    double gain = 0.0;
    for (std::size_t from = 0; from < ns; ++from) {
        // "+" moves k' -> k' - shift (clamped at 0)
        if (k + shift < np) gain += rate(k + shift, from, state, 0) * w(from, k + shift);
        if (k == 0)
            for (std::size_t src = 0; src < std::min(shift, np); ++src) gain += rate(src, from, state, 0) * w(from, src);
        // "-" moves k' -> k' + shift (clamped at np - 1)
        if (k >= shift) gain += rate(k - shift, from, state, 1) * w(from, k - shift);
        if (k == np - 1)
            for (std::size_t src = np > shift ? np - shift : 0; src < np; ++src)
                gain += rate(src, from, state, 1) * w(from, src);
    }
    return w(state, k) + in.dt * (gain - loss * w(state, k));
}

}  // namespace cavcool::kernels
