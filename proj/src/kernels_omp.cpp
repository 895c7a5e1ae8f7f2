#include "cavcool/kernels.hpp"

#include <cmath>
#include <numbers>

namespace cavcool::kernels::omp {

void dvr_kinetic(const DvrKineticInput& in, std::span<double> out) {
    const std::size_t n = in.n;
    const double diag = in.prefactor * std::numbers::pi * std::numbers::pi / 3.0;
#pragma omp parallel for schedule(static)
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            if (i == j) {
                out[j * n + i] = diag;
            } else {
                const double d = static_cast<double>(i) - static_cast<double>(j);
                const double sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;
                out[j * n + i] = in.prefactor * 2.0 * sign / (d * d);
            }
        }
    }
}

void rate_table(const RateKernelInput& in, const RateKernelOutput& out) {
    const std::size_t n = in.n_states;
#pragma omp parallel for schedule(dynamic)
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const std::size_t idx = i * n + j;
            out.spontaneous[idx] = spontaneous_pair_rate(in, i, j);
            out.cavity_plus[idx] = cavity_pair_rate(in, i, j, +1);
            out.cavity_minus[idx] = cavity_pair_rate(in, i, j, -1);
        }
    }
}

void momentum_step(const MomentumKernelInput& in, std::span<double> out) {
#pragma omp parallel for collapse(2) schedule(static)
    for (std::size_t s = 0; s < in.n_states; ++s)
        for (std::size_t k = 0; k < in.n_p; ++k) out[s * in.n_p + k] = momentum_cell(in, s, k);
}

}  // namespace cavcool::kernels::omp
