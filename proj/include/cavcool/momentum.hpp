#pragma once

#include <vector>

#include "cavcool/model.hpp"
#include "cavcool/population.hpp"

namespace cavcool {

class CFLViolation : public Error {
public:
    using Error::Error;
};

// Uniform momentum grid along the cavity axis, symmetric about p = 0.
struct MomentumGrid {
    double dp = 0.0;    // kg m/s
    int n = 0;          // odd; index n/2 is p = 0
    int shift = 1;      // recoil hbar k in grid cells

    double p(int k) const { return (k - n / 2) * dp; }
};

// spacing hbar k / m_int, bounds +-8 sqrt(M k_B T).
MomentumGrid make_momentum_grid(double mass_kg, double temperature_K, double hbar_k, int m_int = 4);

struct MomentumDistribution {
    MomentumGrid grid;
    std::size_t n_states = 0;
    std::vector<double> w;  // [state][p]

    double total() const;
    std::vector<double> internal() const;     // sum over p per state
    double mean_p_sq() const;                 // <p^2>
    double kinetic_energy(double mass_kg) const;
    double& at(std::size_t s, int k) { return w[s * static_cast<std::size_t>(grid.n) + static_cast<std::size_t>(k)]; }
    double at(std::size_t s, int k) const { return w[s * static_cast<std::size_t>(grid.n) + static_cast<std::size_t>(k)]; }
};

// Internal populations times a Maxwell-Boltzmann momentum profile.
MomentumDistribution thermal_momentum(const std::vector<double>& internal, const MomentumGrid& g, double mass_kg,
                                      double temperature_K);

// Rates on every grid momentum: [p][from][to][dir], dir 0 = "+" (p -> p - hbar k).
// Spontaneous scattering is split evenly between the two recoil directions.
struct MomentumRates {
    MomentumGrid grid;
    std::size_t n_states = 0;
    std::vector<double> r;
    double max_total = 0.0;  // largest total outflow rate of any cell
};

MomentumRates momentum_rates(const CoolingModel& model, const MomentumGrid& g, double laser_offset,
                             const RateOptions& ro = {});

// One explicit step of the momentum-resolved rate equation. Throws
// CFLViolation when dt times the largest outflow rate exceeds 0.1.
MomentumDistribution evolve_momentum(const MomentumDistribution& w, const MomentumRates& rates, double dt,
                                     Execution ex = Execution::parallel);

struct DopplerLimit {
    double energy = 0.0;        // E_kin^inf, J
    double temperature = 0.0;   // E / k_B, K
    double cooling_rate = 0.0;  // s^-1, 0 unless amplitude and mass are given
    bool heating = false;       // delta >= 0
};

// E_inf = (hbar / 4) (delta^2 + kappa^2) / |delta|. With the Rayleigh
// scattering amplitude A (rates A / (delta^2 + kappa^2) per direction) the
// cooling rate is 2 hbar k^2 |d(Gamma+ + Gamma-)/d delta| / M.
DopplerLimit doppler_limit(double kappa, double delta, double amplitude = 0.0, double wavenumber = 0.0,
                           double mass_kg = 0.0);

}  // namespace cavcool
