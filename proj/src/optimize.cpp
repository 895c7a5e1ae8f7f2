#include "cavcool/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "cavcool/spectrum.hpp"

namespace cavcool {

namespace {

struct Candidate {
    std::size_t from = 0;
    std::size_t to = 0;
    TransitionTarget target;
    Eigen::MatrixXd generator;
};

Candidate make_candidate(const CoolingModel& model, std::size_t i, std::size_t j, const RateOptions& ro) {
    const auto& b = *model.basis();
    Candidate c;
    c.from = i;
    c.to = j;
    c.target = {b.states[i].v, b.states[j].v, b.states[i].J, b.states[j].J};
    const double offset = detuning_for(b, i, j, model.cavity(), model.laser());
    c.generator = generator(model.rates(offset, 0.0, ro));
    return c;
}

std::vector<double> step_populations(const Eigen::MatrixXd& m, double dt, const std::vector<double>& p) {
    const Eigen::MatrixXd e = (m * dt).exp();
    const Eigen::VectorXd x = e * Eigen::Map<const Eigen::VectorXd>(p.data(), static_cast<Eigen::Index>(p.size()));
    std::vector<double> out(x.data(), x.data() + x.size());
    sanitize(out);
    return out;
}

double objective_of(const std::vector<double>& p, const RoVibBasis& b, double w) {
    double j = 0.0, v = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        j += p[i] * b.states[i].J;
        v += p[i] * b.states[i].v;
    }
    return j + w * v;
}

}  // namespace

double evaluate_schedule(const CoolingModel& model, const PopulationVector& p0, const CoolingSchedule& s, double weight,
                         const RateOptions& ro) {
    RunOptions opt;
    opt.rates = ro;
    const auto traj = run(s, model, p0, opt);
    return cooling_objective(traj.back(), weight);
}

CoolingSchedule greedy_optimize(const CoolingModel& model, const PopulationVector& p0, const GreedyOptions& opt) {
    if (opt.horizon_steps < 1) throw ScheduleError("greedy horizon must be at least one step");
    if (!(opt.step_duration > 0.0)) throw ScheduleError("greedy step duration must be positive");
    const auto& b = *model.basis();

    // One propagator per transition; the laser setting of a candidate does
    // not depend on the populations.
    std::map<std::pair<std::size_t, std::size_t>, Eigen::MatrixXd> propagators;
    auto all = anti_stokes_transitions(b);
    std::vector<Eigen::MatrixXd> built(all.size());
#pragma omp parallel for schedule(dynamic)
    for (std::size_t k = 0; k < all.size(); ++k)
        built[k] = (make_candidate(model, all[k].first, all[k].second, opt.rates).generator * opt.step_duration).exp();
    for (std::size_t k = 0; k < all.size(); ++k) propagators.emplace(all[k], std::move(built[k]));

    CoolingSchedule s;
    s.label = opt.policy == GreedyPolicy::rotational_first ? "greedy rotational-first" : "greedy";
    std::vector<double> p = p0.p;
    for (int step = 0; step < opt.horizon_steps; ++step) {
        auto cands = anti_stokes_transitions(b, &p, opt.min_population);
        if (cands.empty()) break;
        if (opt.policy == GreedyPolicy::rotational_first) {
            // Keep pure rotational steps while any of them still lowers <J>.
            std::vector<std::pair<std::size_t, std::size_t>> rot;
            const double j_now = objective_of(p, b, 0.0);
            for (const auto& c : cands) {
                if (b.states[c.first].v != b.states[c.second].v) continue;
                const Eigen::VectorXd x =
                    propagators.at(c) * Eigen::Map<const Eigen::VectorXd>(p.data(), static_cast<Eigen::Index>(p.size()));
                std::vector<double> q(x.data(), x.data() + x.size());
                if (objective_of(q, b, 0.0) < j_now - 1e-9) rot.push_back(c);
            }
            if (!rot.empty()) cands = rot;
        }

        std::vector<double> score(cands.size());
        std::vector<std::vector<double>> next(cands.size());
#pragma omp parallel for schedule(static)
        for (std::size_t k = 0; k < cands.size(); ++k) {
            const Eigen::VectorXd x = propagators.at(cands[k]) *
                                      Eigen::Map<const Eigen::VectorXd>(p.data(), static_cast<Eigen::Index>(p.size()));
            next[k].assign(x.data(), x.data() + x.size());
            sanitize(next[k]);
            score[k] = objective_of(next[k], b, opt.weight);
        }

        std::size_t best = 0;
        for (std::size_t k = 1; k < cands.size(); ++k) {
            const double tol = 1e-12 * std::max(1.0, std::abs(score[best]));
            const auto& sb = b.states[cands[best].second];
            const auto& sk = b.states[cands[k].second];
            if (score[k] < score[best] - tol) {
                best = k;
            } else if (std::abs(score[k] - score[best]) <= tol) {
                // ties: lower final J, then label
                const std::string lk = transition_label(b.states[cands[k].first], sk);
                const std::string lb = transition_label(b.states[cands[best].first], sb);
                if (sk.J < sb.J || (sk.J == sb.J && lk < lb)) best = k;
            }
        }
        ScheduleStep st;
        st.target = TransitionTarget{b.states[cands[best].first].v, b.states[cands[best].second].v,
                                     b.states[cands[best].first].J, b.states[cands[best].second].J};
        st.duration = opt.step_duration;
        s.steps.push_back(st);
        p = next[best];
    }
    if (s.steps.empty()) throw NothingToCool("no anti-Stokes transition leaves the occupied levels");
    return s;
}

namespace {

struct Gene {
    int candidate = 0;
    double duration = 0.0;
};
using Genome = std::vector<Gene>;

}  // namespace

EvolutionResult evolutionary_optimize(const CoolingModel& model, const PopulationVector& p0,
                                      const EvolutionOptions& opt) {
    if (opt.horizon_steps < 1) throw ScheduleError("evolutionary horizon must be at least one step");
    if (opt.population_size < 2) throw ScheduleError("population size must be at least 2");
    if (opt.generations < 0) throw ScheduleError("generations must be non-negative");
    const auto& b = *model.basis();

    const auto pairs = anti_stokes_transitions(b);
    if (pairs.empty()) throw NothingToCool("basis has no anti-Stokes transitions");
    std::vector<Candidate> cands(pairs.size());
#pragma omp parallel for schedule(dynamic)
    for (std::size_t k = 0; k < pairs.size(); ++k)
        cands[k] = make_candidate(model, pairs[k].first, pairs[k].second, opt.rates);

    auto index_of = [&](const TransitionTarget& t) {
        for (std::size_t k = 0; k < cands.size(); ++k)
            if (cands[k].target == t) return static_cast<int>(k);
        return -1;
    };
    auto evaluate = [&](const Genome& g) {
        std::vector<double> p = p0.p;
        for (const auto& gene : g)
            p = step_populations(cands[static_cast<std::size_t>(gene.candidate)].generator, gene.duration, p);
        return objective_of(p, b, opt.weight);
    };
    auto to_schedule = [&](const Genome& g) {
        CoolingSchedule s;
        s.label = "evolutionary seed " + std::to_string(opt.seed);
        for (const auto& gene : g) {
            ScheduleStep st;
            st.target = cands[static_cast<std::size_t>(gene.candidate)].target;
            st.duration = gene.duration;
            s.steps.push_back(st);
        }
        return s;
    };

    std::mt19937_64 rng(opt.seed);
    auto uniform_int = [&](int n) { return static_cast<int>(std::uniform_int_distribution<int>(0, n - 1)(rng)); };
    auto uniform01 = [&]() { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); };
    const int n_c = static_cast<int>(cands.size());
    const int h = opt.horizon_steps;

    std::vector<Genome> pop;
    for (const auto& seed : opt.seeds) {
        // Seeds are cycled or truncated to the horizon; foreign steps are dropped.
        std::vector<Gene> genes;
        for (const auto& st : seed.steps)
            if (st.target)
                if (int k = index_of(*st.target); k >= 0) genes.push_back({k, st.duration});
        if (genes.empty()) continue;
        Genome g;
        for (int k = 0; k < h; ++k) g.push_back(genes[static_cast<std::size_t>(k) % genes.size()]);
        pop.push_back(g);
    }
    while (static_cast<int>(pop.size()) < opt.population_size) {
        Genome g(static_cast<std::size_t>(h));
        for (auto& gene : g) gene = {uniform_int(n_c), opt.step_duration};
        pop.push_back(g);
    }
    pop.resize(static_cast<std::size_t>(std::max(opt.population_size, static_cast<int>(opt.seeds.size()))));

    std::vector<double> fit(pop.size());
    auto evaluate_all = [&]() {
#pragma omp parallel for schedule(dynamic)
        for (std::size_t k = 0; k < pop.size(); ++k) fit[k] = evaluate(pop[k]);
    };
    auto rank = [&]() {
        std::vector<std::size_t> order(pop.size());
        for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t c) { return fit[a] < fit[c]; });
        std::vector<Genome> p2;
        std::vector<double> f2;
        for (std::size_t k : order) {
            p2.push_back(pop[k]);
            f2.push_back(fit[k]);
        }
        pop = std::move(p2);
        fit = std::move(f2);
    };

    EvolutionResult res;
    evaluate_all();
    rank();
    res.history.push_back(fit.front());

    const double min_duration = 1e-3 * opt.step_duration;
    for (int gen = 0; gen < opt.generations; ++gen) {
        std::vector<Genome> next(pop.begin(), pop.begin() + std::min<std::ptrdiff_t>(opt.elite, pop.size()));
        auto tournament = [&]() -> const Genome& {
            const int a = uniform_int(static_cast<int>(pop.size()));
            const int c = uniform_int(static_cast<int>(pop.size()));
            return fit[static_cast<std::size_t>(a)] <= fit[static_cast<std::size_t>(c)] ? pop[static_cast<std::size_t>(a)]
                                                                                         : pop[static_cast<std::size_t>(c)];
        };
        while (next.size() < pop.size()) {
            const Genome& pa = tournament();
            const Genome& pb = tournament();
            Genome child = pa;
            const int cut = uniform_int(h);
            for (int k = cut; k < h; ++k) child[static_cast<std::size_t>(k)] = pb[static_cast<std::size_t>(k)];
            if (uniform01() < opt.mutation_rate) {
                const int kind = uniform_int(3);
                const auto a = static_cast<std::size_t>(uniform_int(h));
                const auto c = static_cast<std::size_t>(uniform_int(h));
                if (kind == 0) {
                    std::swap(child[a], child[c]);
                } else if (kind == 1) {
                    child[a].candidate = uniform_int(n_c);
                } else if (a != c) {
                    const double moved = uniform01() * 0.5 * child[a].duration;
                    if (child[a].duration - moved >= min_duration) {
                        child[a].duration -= moved;
                        child[c].duration += moved;
                    }
                }
            }
            next.push_back(std::move(child));
        }
        pop = std::move(next);
        evaluate_all();
        rank();
        res.history.push_back(fit.front());
    }
    res.best = to_schedule(pop.front());
    res.best_objective = fit.front();
    return res;
}

}  // namespace cavcool
