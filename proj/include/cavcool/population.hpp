#pragma once

#include <memory>
#include <vector>

#include "cavcool/molecule.hpp"

namespace cavcool {

struct PopulationVector {
    std::shared_ptr<const RoVibBasis> basis;
    std::vector<double> p;
    double time = 0.0;  // s

    double total() const;
    double mean_J() const;
    double mean_v() const;
    // Fraction in v = 0, J in {0, 1}.
    double ground_fraction() const;
    // Sum over the odd-J ladder; conserved by every Raman process.
    double odd_fraction() const;
    double at(int v, int J) const;
};

PopulationVector boltzmann_populations(std::shared_ptr<const RoVibBasis> b, double temperature_K,
                                       bool degeneracy = true);

}  // namespace cavcool
