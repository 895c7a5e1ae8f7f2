#include "cavcool/momentum.hpp"

#include <algorithm>
#include <cmath>

namespace cavcool {

MomentumGrid make_momentum_grid(double mass_kg, double temperature_K, double hbar_k, int m_int) {
    if (m_int < 1) throw Error("momentum grid needs m_int >= 1");
    if (!(temperature_K > 0.0) || !(mass_kg > 0.0) || !(hbar_k > 0.0))
        throw Error("momentum grid needs positive mass, temperature and recoil");
    MomentumGrid g;
    g.dp = hbar_k / m_int;
    g.shift = m_int;
    const double p_max = 8.0 * std::sqrt(mass_kg * constants::k_B * temperature_K);
    const int half = std::max(g.shift, static_cast<int>(std::ceil(p_max / g.dp)));
    g.n = 2 * half + 1;
    return g;
}

double MomentumDistribution::total() const {
    double s = 0.0;
    for (double x : w) s += x;
    return s;
}

std::vector<double> MomentumDistribution::internal() const {
    std::vector<double> out(n_states, 0.0);
    for (std::size_t s = 0; s < n_states; ++s)
        for (int k = 0; k < grid.n; ++k) out[s] += at(s, k);
    return out;
}

double MomentumDistribution::mean_p_sq() const {
    double s = 0.0;
    for (std::size_t st = 0; st < n_states; ++st)
        for (int k = 0; k < grid.n; ++k) s += at(st, k) * grid.p(k) * grid.p(k);
    return s / total();
}

double MomentumDistribution::kinetic_energy(double mass_kg) const { return mean_p_sq() / (2.0 * mass_kg); }

MomentumDistribution thermal_momentum(const std::vector<double>& internal, const MomentumGrid& g, double mass_kg,
                                      double temperature_K) {
    MomentumDistribution d;
    d.grid = g;
    d.n_states = internal.size();
    d.w.assign(d.n_states * static_cast<std::size_t>(g.n), 0.0);
    const double s2 = mass_kg * constants::k_B * temperature_K;
    std::vector<double> prof(static_cast<std::size_t>(g.n));
    double norm = 0.0;
    for (int k = 0; k < g.n; ++k) {
        const double p = g.p(k);
        prof[static_cast<std::size_t>(k)] = std::exp(-p * p / (2.0 * s2));
        norm += prof[static_cast<std::size_t>(k)];
    }
    for (std::size_t s = 0; s < d.n_states; ++s)
        for (int k = 0; k < g.n; ++k) d.at(s, k) = internal[s] * prof[static_cast<std::size_t>(k)] / norm;
    return d;
}

MomentumRates momentum_rates(const CoolingModel& model, const MomentumGrid& g, double laser_offset,
                             const RateOptions& ro) {
    MomentumRates mr;
    mr.grid = g;
    mr.n_states = model.basis()->size();
    const std::size_t ns = mr.n_states;
    mr.r.assign(static_cast<std::size_t>(g.n) * ns * ns * 2, 0.0);
    for (int k = 0; k < g.n; ++k) {
        const auto t = model.rates(laser_offset, g.p(k), ro);
        for (std::size_t i = 0; i < ns; ++i) {
            double out = 0.0;
            for (std::size_t j = 0; j < ns; ++j) {
                const std::size_t base = ((static_cast<std::size_t>(k) * ns + i) * ns + j) * 2;
                const double sp = 0.5 * t.spont(i, j);
                mr.r[base] = t.cav_plus(i, j) + sp;
                mr.r[base + 1] = t.cav_minus(i, j) + sp;
                out += mr.r[base] + mr.r[base + 1];
            }
            mr.max_total = std::max(mr.max_total, out);
        }
    }
    return mr;
}

MomentumDistribution evolve_momentum(const MomentumDistribution& w, const MomentumRates& rates, double dt,
                                     Execution ex) {
    if (w.grid.n != rates.grid.n || w.n_states != rates.n_states) throw Error("momentum rates do not match the grid");
    if (!(dt > 0.0)) throw Error("momentum step needs dt > 0");
    if (dt * rates.max_total > 0.1)
        throw CFLViolation("dt * max rate = " + std::to_string(dt * rates.max_total) + " exceeds 0.1");
    kernels::MomentumKernelInput in;
    in.n_states = w.n_states;
    in.n_p = static_cast<std::size_t>(w.grid.n);
    in.shift = w.grid.shift;
    in.dt = dt;
    in.weight = w.w;
    in.rates = rates.r;
    MomentumDistribution out = w;
    kernels::momentum_step(in, out.w, ex);
    return out;
}

DopplerLimit doppler_limit(double kappa, double delta, double amplitude, double wavenumber, double mass_kg) {
    DopplerLimit d;
    d.heating = delta >= 0.0;
    if (delta == 0.0) {
        d.energy = std::numeric_limits<double>::infinity();
        d.temperature = d.energy;
        return d;
    }
    d.energy = 0.25 * constants::hbar * (delta * delta + kappa * kappa) / std::abs(delta);
    d.temperature = d.energy / constants::k_B;
    if (amplitude > 0.0 && mass_kg > 0.0) {
        // d/d delta of 2 A / (delta^2 + kappa^2)
        const double den = delta * delta + kappa * kappa;
        const double slope = std::abs(2.0 * amplitude * 2.0 * delta / (den * den));
        const double rate = 2.0 * constants::hbar * wavenumber * wavenumber * slope / mass_kg;
        d.cooling_rate = d.heating ? -rate : rate;
    }
    return d;
}

}  // namespace cavcool
