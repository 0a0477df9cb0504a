#pragma once

/// @file engine.hpp
/// @brief AOEA (operators co-evolved as trees with punish/reward rates) and
/// the HAEA and GA baselines, plus the selection and rate primitives they
/// share.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "aoea/atomic_ops.hpp"
#include "aoea/benchmarks.hpp"
#include "aoea/core.hpp"
#include "aoea/optree.hpp"

namespace aoea {

enum class Algorithm { AOEA, HAEA, GA };

inline constexpr std::array<Algorithm, 3> kAlgorithms{Algorithm::GA, Algorithm::HAEA, Algorithm::AOEA};

inline std::string_view algorithm_name(Algorithm a) {
    switch (a) {
        case Algorithm::AOEA: return "AOEA";
        case Algorithm::HAEA: return "HAEA";
        case Algorithm::GA: return "GA";
    }
    return "?";
}

inline Algorithm parse_algorithm(std::string_view s) {
    std::string u;
    for (char c : s) u.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    if (u == "AOEA") return Algorithm::AOEA;
    if (u == "HAEA") return Algorithm::HAEA;
    if (u == "GA") return Algorithm::GA;
    throw std::invalid_argument("unknown algorithm '" + std::string(s) + "'");
}

/// How operator trees are paired for recombination.
enum class OperatorSelection {
    ShufflePair,  ///< shuffle the pool, recombine adjacent slots
    RateRoulette  ///< draw both parents by roulette over the rates
};

struct EngineConfig {
    Algorithm algorithm = Algorithm::AOEA;
    std::size_t population_size = 50;
    std::size_t kappa = 16;
    std::size_t generations = 500;
    std::uint64_t seed = 0;
    /// Seed of the initial population stream; defaults to `seed`. Runs of
    /// different algorithms sharing this value start from the same population.
    std::optional<std::uint64_t> init_seed;

    double ga_mutation_probability = 0.1;
    OperatorSelection operator_selection = OperatorSelection::ShufflePair;
    /// Per-tree mutation probability; defaults to 1/kappa.
    std::optional<double> operator_mutation_probability;
    std::size_t max_nodes = kDefaultMaxNodes;
    int init_depth = kDefaultInitDepth;
    /// Operator-tree snapshot cadence in generations (0 disables snapshots).
    std::size_t snapshot_every = 1;

    /// Replaces random operator initialization (size must equal kappa).
    std::optional<std::vector<OperatorTree>> initial_trees;
    /// When false the operator trees are frozen (no recombination, no mutation).
    bool evolve_operators = true;
};

inline void validate(const EngineConfig& c) {
    if (c.population_size < 2) throw std::invalid_argument("population size must be at least 2");
    if (c.generations < 1) throw std::invalid_argument("generations must be at least 1");
    if (c.algorithm == Algorithm::AOEA) {
        if (c.kappa < 2 || c.kappa % 2 != 0) throw std::invalid_argument("kappa must be even and at least 2");
        if (c.initial_trees && c.initial_trees->size() != c.kappa) {
            throw std::invalid_argument("initial_trees must hold kappa trees");
        }
    }
    if (c.ga_mutation_probability < 0.0 || c.ga_mutation_probability > 1.0) {
        throw std::invalid_argument("GA mutation probability must lie in [0, 1]");
    }
    if (c.init_depth < 1) throw std::invalid_argument("init_depth must be at least 1");
}

struct GenerationRecord {
    std::size_t generation = 0;
    double best_fitness = 0.0;
    double median_fitness = 0.0;
    /// Largest operator rate; NaN for algorithms without rates (GA).
    double max_rate = 0.0;
    std::vector<double> rates;
    std::size_t evaluations = 0;  ///< cumulative objective evaluations
    std::vector<std::string> trees;  ///< serialized operator trees, when snapshotted

    bool operator==(const GenerationRecord& o) const {
        auto same = [](double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); };
        return generation == o.generation && same(best_fitness, o.best_fitness) &&
               same(median_fitness, o.median_fitness) && same(max_rate, o.max_rate) && rates == o.rates &&
               evaluations == o.evaluations && trees == o.trees;
    }
};

struct RunTrace {
    Algorithm algorithm = Algorithm::AOEA;
    Direction direction = Direction::Minimize;
    std::vector<GenerationRecord> records;  ///< generations + 1 entries
    RealGenome best_genome;
    double best_fitness = 0.0;

    bool operator==(const RunTrace&) const = default;
};

// ---------------------------------------------------------------------------
// Selection primitives

/// Index i with probability weights[i] / sum(weights).
inline std::size_t roulette_select(std::span<const double> weights, RandomStream& rng) {
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0) || std::isinf(w)) throw std::invalid_argument("roulette weights must be finite and nonnegative");
        total += w;
    }
    if (!(total > 0.0)) throw std::invalid_argument("roulette weights sum to zero");
    const double target = rng.uniform() * total;
    double acc = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] <= 0.0) continue;
        acc += weights[i];
        last_positive = i;
        if (target < acc) return i;
    }
    return last_positive;
}

/// Windowed fitness-proportional weights: distance from the worst member
/// plus a small floor, so every weight is positive under both directions.
inline std::vector<double> fitness_selection_weights(std::span<const double> fitness, Direction d) {
    if (fitness.empty()) throw std::invalid_argument("fitness_selection_weights: empty population");
    std::optional<double> worst;
    for (double f : fitness) {
        if (std::isnan(f)) throw std::domain_error("fitness_selection_weights: NaN fitness");
        if (!std::isfinite(f)) continue;
        if (!worst || better(*worst, f, d)) worst = f;
    }
    const double w0 = worst.value_or(0.0);
    const double eps = 1e-12 * std::max(1.0, std::abs(w0));
    std::vector<double> w;
    w.reserve(fitness.size());
    for (double f : fitness) {
        if (!std::isfinite(f)) {
            const bool winning = d == Direction::Minimize ? f < 0 : f > 0;
            w.push_back(winning ? 1.0 : eps);  // -Inf under minimization
            continue;
        }
        w.push_back((d == Direction::Minimize ? w0 - f : f - w0) + eps);
    }
    return w;
}

inline std::vector<double> fitness_selection_weights(const Population& pop, Direction d) {
    std::vector<double> f;
    f.reserve(pop.size());
    for (const auto& ind : pop) f.push_back(ind.fitness());
    return fitness_selection_weights(f, d);
}

inline void normalize(std::vector<double>& rates) {
    const double total = std::accumulate(rates.begin(), rates.end(), 0.0);
    if (!(total > 0.0) || !std::isfinite(total)) throw std::domain_error("cannot normalize rates");
    for (double& r : rates) r /= total;
}

/// Uniform random values in (0, 1), normalized to sum 1.
inline std::vector<double> random_rates(std::size_t n, RandomStream& rng) {
    std::vector<double> r(n);
    for (double& v : r) v = rng.uniform_open();
    normalize(r);
    return r;
}

/// One rate update with a given delta.
inline double apply_vote(double rate, int votes, double delta) {
    if (votes > 0) return (1.0 + delta) * rate;
    if (votes < 0) return (1.0 - delta) * rate;
    return rate;
}

/// Reward (votes > 0) multiplies by 1 + delta, punishment by 1 - delta; zero
/// votes leave the rate alone. delta ~ U(0,1) is drawn per entry, in order,
/// whether or not it is used. One normalization follows all updates.
inline void punish_reward(std::vector<double>& rates, std::span<const int> votes, RandomStream& rng) {
    if (votes.size() != rates.size()) throw std::invalid_argument("vote tally length differs from rate count");
    for (std::size_t i = 0; i < rates.size(); ++i) {
        const double delta = rng.uniform_open();
        rates[i] = apply_vote(rates[i], votes[i], delta);
    }
    normalize(rates);
}

// ---------------------------------------------------------------------------
// AOEA

struct OperatorPool {
    std::vector<OperatorTree> trees;
    std::vector<double> rates;

    std::size_t size() const { return trees.size(); }
};

inline OperatorPool init_operator_pool(std::size_t kappa, int max_depth, RandomStream& rng) {
    OperatorPool pool;
    pool.trees.reserve(kappa);
    for (std::size_t i = 0; i < kappa; ++i) pool.trees.push_back(random_tree(max_depth, rng));
    pool.rates = random_rates(kappa, rng);
    return pool;
}

using VoteTally = std::vector<int>;

struct CrossoverOutcome {
    Population population;
    VoteTally votes;
    std::size_t evaluations = 0;
};

/// One pass over the population: every individual picks an operator by rate
/// and a mate by fitness, keeps the better of op(ind, mate) and op(mate, ind)
/// if it is at least as good, and votes +1 for a strict improvement, -1
/// otherwise.
inline CrossoverOutcome crossover_population(const Population& pop, const OperatorPool& pool, const Problem& p,
                                             RandomStream& rng) {
    CrossoverOutcome out;
    out.votes.assign(pool.size(), 0);
    out.population.reserve(pop.size());
    const auto mate_weights = fitness_selection_weights(pop, p.direction);
    for (const auto& ind : pop) {
        const std::size_t op = roulette_select(pool.rates, rng);
        const Individual& mate = pop[roulette_select(mate_weights, rng)];
        Individual child1(evaluate_tree(pool.trees[op], ind.genome(), mate.genome(), p, rng), p);
        Individual child2(evaluate_tree(pool.trees[op], mate.genome(), ind.genome(), p, rng), p);
        out.evaluations += 2;
        Individual& child = better(child2.fitness(), child1.fitness(), p.direction) ? child2 : child1;
        out.votes[op] += better(child.fitness(), ind.fitness(), p.direction) ? 1 : -1;
        if (better_or_equal(child.fitness(), ind.fitness(), p.direction)) {
            out.population.push_back(std::move(child));
        } else {
            out.population.push_back(ind);
        }
    }
    return out;
}

inline void update_rates(OperatorPool& pool, std::span<const int> votes, RandomStream& rng) {
    punish_reward(pool.rates, votes, rng);
}

/// Recombines the operator trees pairwise. Under ShufflePair each child
/// inherits the rate of the slot it lands in, so the rates stay on the simplex.
inline void crossover_operators(OperatorPool& pool, RandomStream& rng,
                                OperatorSelection mode = OperatorSelection::ShufflePair,
                                std::size_t max_nodes = kDefaultMaxNodes) {
    const std::size_t k = pool.size();
    if (k % 2 != 0) throw std::invalid_argument("crossover_operators: pool size must be even");
    if (mode == OperatorSelection::ShufflePair) {
        std::vector<std::size_t> order(k);
        std::iota(order.begin(), order.end(), 0);
        rng.shuffle(order);
        OperatorPool next;
        next.trees.reserve(k);
        next.rates.reserve(k);
        for (std::size_t i = 0; i + 1 < k; i += 2) {
            auto [c1, c2] = recombine_trees(pool.trees[order[i]], pool.trees[order[i + 1]], rng, max_nodes);
            next.trees.push_back(std::move(c1));
            next.trees.push_back(std::move(c2));
            next.rates.push_back(pool.rates[order[i]]);
            next.rates.push_back(pool.rates[order[i + 1]]);
        }
        pool = std::move(next);
        return;
    }
    OperatorPool next;
    for (std::size_t i = 0; i + 1 < k; i += 2) {
        const std::size_t a = roulette_select(pool.rates, rng);
        const std::size_t b = roulette_select(pool.rates, rng);
        auto [c1, c2] = recombine_trees(pool.trees[a], pool.trees[b], rng, max_nodes);
        next.trees.push_back(std::move(c1));
        next.trees.push_back(std::move(c2));
        next.rates.push_back(pool.rates[a]);
        next.rates.push_back(pool.rates[b]);
    }
    normalize(next.rates);
    pool = std::move(next);
}

/// Mutates each tree independently with the given probability (a draw is
/// consumed per tree even when the probability is 0 or 1). Returns the
/// number of mutated trees.
inline std::size_t mutate_operators(OperatorPool& pool, RandomStream& rng, double probability) {
    std::size_t mutated = 0;
    for (auto& t : pool.trees) {
        if (rng.uniform() < probability) {
            t = mutate_tree(t, rng);
            ++mutated;
        }
    }
    return mutated;
}

inline std::size_t mutate_operators(OperatorPool& pool, RandomStream& rng) {
    return mutate_operators(pool, rng, 1.0 / static_cast<double>(pool.size()));
}

namespace detail {

inline GenerationRecord record(std::size_t gen, const Population& pop, const Problem& p, std::vector<double> rates,
                               std::size_t evaluations) {
    GenerationRecord r;
    r.generation = gen;
    r.best_fitness = pop[best_index(pop, p.direction)].fitness();
    r.median_fitness = median_fitness(pop);
    r.max_rate = rates.empty() ? std::nan("") : *std::max_element(rates.begin(), rates.end());
    r.rates = std::move(rates);
    r.evaluations = evaluations;
    return r;
}

inline bool snapshot_due(const EngineConfig& c, std::size_t gen) {
    return c.snapshot_every != 0 && (gen % c.snapshot_every == 0 || gen == c.generations);
}

inline void finish(RunTrace& trace, const Population& pop, const Problem& p) {
    const auto& best = pop[best_index(pop, p.direction)];
    trace.best_genome = best.genome();
    trace.best_fitness = best.fitness();
}

inline Population initial_population(const Problem& p, const EngineConfig& c) {
    RandomStream init(c.init_seed.value_or(c.seed));
    return init_population(p, c.population_size, init);
}

/// Algorithm stream, kept apart from the initial-population stream.
inline RandomStream algorithm_stream(const EngineConfig& c) { return RandomStream(derive_seed(c.seed, 0x5eedULL)); }

}  // namespace detail

inline RunTrace aoea_run(const Problem& p, const EngineConfig& c) {
    validate(c);
    validate(p);
    Population pop = detail::initial_population(p, c);
    RandomStream rng = detail::algorithm_stream(c);
    OperatorPool pool;
    if (c.initial_trees) {
        pool.trees = *c.initial_trees;
        pool.rates = random_rates(c.kappa, rng);
    } else {
        pool = init_operator_pool(c.kappa, c.init_depth, rng);
    }
    const double mutation_p = c.operator_mutation_probability.value_or(1.0 / static_cast<double>(c.kappa));

    RunTrace trace;
    trace.algorithm = Algorithm::AOEA;
    trace.direction = p.direction;
    trace.records.reserve(c.generations + 1);
    std::size_t evaluations = pop.size();

    auto snapshot = [&](GenerationRecord& r) {
        if (!detail::snapshot_due(c, r.generation)) return;
        for (const auto& t : pool.trees) r.trees.push_back(serialize(t));
    };
    trace.records.push_back(detail::record(0, pop, p, pool.rates, evaluations));
    snapshot(trace.records.back());

    for (std::size_t gen = 1; gen <= c.generations; ++gen) {
        auto outcome = crossover_population(pop, pool, p, rng);
        pop = std::move(outcome.population);
        evaluations += outcome.evaluations;
        update_rates(pool, outcome.votes, rng);
        if (c.evolve_operators) {
            crossover_operators(pool, rng, c.operator_selection, c.max_nodes);
            mutate_operators(pool, rng, mutation_p);
        }
        trace.records.push_back(detail::record(gen, pop, p, pool.rates, evaluations));
        snapshot(trace.records.back());
    }
    detail::finish(trace, pop, p);
    return trace;
}

// ---------------------------------------------------------------------------
// HAEA baseline: fixed atomic operators, one rate vector per individual.

inline RunTrace haea_run(const Problem& p, const EngineConfig& c) {
    validate(c);
    validate(p);
    Population pop = detail::initial_population(p, c);
    RandomStream rng = detail::algorithm_stream(c);
    const std::size_t n_ops = kUserOps.size();
    std::vector<std::vector<double>> rates(pop.size());
    for (auto& r : rates) r = random_rates(n_ops, rng);

    auto mean_rates = [&] {
        std::vector<double> m(n_ops, 0.0);
        for (const auto& r : rates)
            for (std::size_t k = 0; k < n_ops; ++k) m[k] += r[k];
        for (double& v : m) v /= static_cast<double>(rates.size());
        return m;
    };

    RunTrace trace;
    trace.algorithm = Algorithm::HAEA;
    trace.direction = p.direction;
    trace.records.reserve(c.generations + 1);
    std::size_t evaluations = pop.size();
    trace.records.push_back(detail::record(0, pop, p, mean_rates(), evaluations));

    std::vector<int> votes(n_ops);
    for (std::size_t gen = 1; gen <= c.generations; ++gen) {
        const auto mate_weights = fitness_selection_weights(pop, p.direction);
        Population next;
        next.reserve(pop.size());
        for (std::size_t i = 0; i < pop.size(); ++i) {
            const Individual& ind = pop[i];
            const std::size_t k = roulette_select(rates[i], rng);
            const AtomicOp op = kUserOps[k];
            std::optional<Individual> child;
            if (arity(op) == 1) {
                child.emplace(apply_atomic(op, ind.genome(), p, rng), p);
                evaluations += 1;
            } else {
                const Individual& mate = pop[roulette_select(mate_weights, rng)];
                Individual c1(apply_atomic(op, ind.genome(), mate.genome(), p, rng), p);
                Individual c2(apply_atomic(op, mate.genome(), ind.genome(), p, rng), p);
                evaluations += 2;
                child.emplace(better(c2.fitness(), c1.fitness(), p.direction) ? std::move(c2) : std::move(c1));
            }
            std::fill(votes.begin(), votes.end(), 0);
            votes[k] = better(child->fitness(), ind.fitness(), p.direction) ? 1 : -1;
            punish_reward(rates[i], votes, rng);
            if (better_or_equal(child->fitness(), ind.fitness(), p.direction)) {
                next.push_back(std::move(*child));
            } else {
                next.push_back(ind);
            }
        }
        pop = std::move(next);
        trace.records.push_back(detail::record(gen, pop, p, mean_rates(), evaluations));
    }
    detail::finish(trace, pop, p);
    return trace;
}

// ---------------------------------------------------------------------------
// GA baseline: roulette parents, linear crossover, Gaussian mutation, and the
// same per-slot acceptance rule as AOEA.

inline RunTrace ga_run(const Problem& p, const EngineConfig& c) {
    validate(c);
    validate(p);
    Population pop = detail::initial_population(p, c);
    RandomStream rng = detail::algorithm_stream(c);

    RunTrace trace;
    trace.algorithm = Algorithm::GA;
    trace.direction = p.direction;
    trace.records.reserve(c.generations + 1);
    std::size_t evaluations = pop.size();
    trace.records.push_back(detail::record(0, pop, p, {}, evaluations));

    for (std::size_t gen = 1; gen <= c.generations; ++gen) {
        const auto weights = fitness_selection_weights(pop, p.direction);
        Population next;
        next.reserve(pop.size());
        for (const auto& ind : pop) {
            const Individual& a = pop[roulette_select(weights, rng)];
            const Individual& b = pop[roulette_select(weights, rng)];
            RealGenome g = ops::linear_crossover(a.genome(), b.genome(), p, rng);
            if (rng.uniform() < c.ga_mutation_probability) g = ops::gaussian_noise(std::move(g), p, rng);
            Individual child(std::move(g), p);
            evaluations += 1;
            if (better_or_equal(child.fitness(), ind.fitness(), p.direction)) {
                next.push_back(std::move(child));
            } else {
                next.push_back(ind);
            }
        }
        pop = std::move(next);
        trace.records.push_back(detail::record(gen, pop, p, {}, evaluations));
    }
    detail::finish(trace, pop, p);
    return trace;
}

inline RunTrace run(const Problem& p, const EngineConfig& c) {
    switch (c.algorithm) {
        case Algorithm::AOEA: return aoea_run(p, c);
        case Algorithm::HAEA: return haea_run(p, c);
        case Algorithm::GA: return ga_run(p, c);
    }
    throw std::logic_error("unknown algorithm");
}

}  // namespace aoea
