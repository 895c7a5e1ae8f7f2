#pragma once

#include <cstdint>
#include <vector>

#include "cavcool/schedule.hpp"

namespace cavcool {

enum class GreedyPolicy {
    combined,          // minimise <J> + w <v> directly
    rotational_first,  // prefer dv = 0 steps while they still lower <J>
};

struct GreedyOptions {
    int horizon_steps = 42;
    double step_duration = 0.06;   // s
    double weight = 2.0;           // w in <J> + w <v>
    double min_population = 1e-6;  // sources below this are not candidates
    GreedyPolicy policy = GreedyPolicy::combined;
    RateOptions rates;
};

CoolingSchedule greedy_optimize(const CoolingModel& model, const PopulationVector& p0, const GreedyOptions& opt);

struct EvolutionOptions {
    int horizon_steps = 42;
    double step_duration = 0.06;  // s, initial duration of every gene
    double weight = 2.0;
    int generations = 50;
    int population_size = 24;
    int elite = 2;
    double mutation_rate = 0.3;
    std::uint64_t seed = 1;
    std::vector<CoolingSchedule> seeds;  // added to the initial population (e.g. top-down, greedy)
    RateOptions rates;
};

struct EvolutionResult {
    CoolingSchedule best;
    double best_objective = 0.0;
    std::vector<double> history;  // best objective after each generation (index 0 = initial population)
};

// Genetic search over fixed-length step lists. Mutations swap two genes,
// replace a gene's transition, or move duration between two genes (total
// conserved); one-point crossover; elitism keeps the best schedules unchanged.
EvolutionResult evolutionary_optimize(const CoolingModel& model, const PopulationVector& p0,
                                      const EvolutionOptions& opt);

// Final objective of running `s` once from p0.
double evaluate_schedule(const CoolingModel& model, const PopulationVector& p0, const CoolingSchedule& s,
                         double weight, const RateOptions& ro = {});

}  // namespace cavcool
