#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "cavcool/population.hpp"
#include "cavcool/rates.hpp"

namespace cavcool {

class NonGenerator : public Error {
public:
    using Error::Error;
};
class NegativePopulation : public Error {
public:
    using Error::Error;
};

struct StationaryBlock {
    std::vector<std::size_t> states;  // members of one closed communicating class
    std::string label;
    Eigen::VectorXd distribution;     // full-length, zero outside the block, sums to 1
};

class ReducibleGenerator : public Error {
public:
    ReducibleGenerator(const std::string& what, std::vector<StationaryBlock> blocks)
        : Error(what), blocks_(std::move(blocks)) {}
    const std::vector<StationaryBlock>& blocks() const { return blocks_; }

private:
    std::vector<StationaryBlock> blocks_;
};

// Rate-equation generator: M(j, i) = rate i -> j for i != j, M(i, i) = -sum_j rate i -> j.
Eigen::MatrixXd generator(const RateTable& rates);
// From a dense rate matrix R(i, j) = rate i -> j (diagonal ignored).
Eigen::MatrixXd generator_from_rates(const Eigen::MatrixXd& r);
// Throws NonGenerator if off-diagonals are negative or column sums exceed 1e-9 (relative to the largest rate).
void check_generator(const Eigen::MatrixXd& m);

// Clamp values in [-1e-12, 0) to zero and renormalise; more negative entries throw.
void sanitize(std::vector<double>& p);

// exp(M dt) P.
PopulationVector propagate_step(const PopulationVector& p, const Eigen::MatrixXd& m, double dt);
PopulationVector propagate_step(const PopulationVector& p, const RateTable& rates, double dt);

// Cached exp(M dt) for repeated equal steps.
class Propagator {
public:
    Propagator(const Eigen::MatrixXd& m, double dt);
    void apply(std::vector<double>& p) const;
    void apply(PopulationVector& p) const;
    double dt() const { return dt_; }
    const Eigen::MatrixXd& matrix() const { return exp_; }

private:
    Eigen::MatrixXd exp_;
    double dt_ = 0.0;
};

// Stationary distribution of every closed class of M.
std::vector<StationaryBlock> stationary_blocks(const Eigen::MatrixXd& m, const std::vector<std::string>& labels = {});
// Unique stationary state; throws ReducibleGenerator if there is more than one closed class.
Eigen::VectorXd stationary(const Eigen::MatrixXd& m);
PopulationVector stationary(const RateTable& rates);
// Long-time limit of exp(M t) P0: closed-class distributions weighted by the
// probability of ending up in each class.
Eigen::VectorXd stationary_from(const Eigen::MatrixXd& m, const Eigen::VectorXd& p0);

struct PopulationTrajectory {
    std::shared_ptr<const RoVibBasis> basis;
    std::vector<double> times;              // s
    std::vector<std::vector<double>> populations;
    std::vector<double> kinetic_energy;     // J, empty unless the momentum model ran
    std::vector<std::string> step_labels;   // schedule step active up to each sample

    void append(const PopulationVector& p, const std::string& step_label = "", double ekin = -1.0);
    std::size_t size() const { return times.size(); }
    double mean_J(std::size_t k) const;
    double mean_v(std::size_t k) const;
    double ground_fraction(std::size_t k) const;
    PopulationVector at(std::size_t k) const;
    PopulationVector back() const { return at(size() - 1); }
};

// Tab-separated table: t_s, one column per state label, meanJ, meanV, Ekin_J.
std::string export_trajectory(const PopulationTrajectory& t, const std::vector<std::string>& header_lines = {});

}  // namespace cavcool
