#pragma once

/// @file core.hpp
/// @brief Genomes, problems, populations, the seeded random stream and
/// direction-aware fitness comparison shared by every other header.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace aoea {

using RealGenome = std::vector<double>;

enum class Direction { Minimize, Maximize };

/// SplitMix64 finalizer. Used to derive independent stream seeds from
/// (base_seed, index...) tuples.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) noexcept {
    return mix64(base ^ mix64(index + 0x632be59bd9b4e019ULL));
}

template <typename... Rest>
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index, Rest... rest) noexcept {
    return derive_seed(derive_seed(base, index), static_cast<std::uint64_t>(rest)...);
}

/// Deterministic random stream.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard. The distribution transforms are implemented here rather than
/// taken from <random>, because the standard library's distributions are
/// implementation-defined and would break cross-platform replay.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : engine_(mix64(seed)) {}

    /// Child stream, independent of this one, identified by `index`.
    [[nodiscard]] RandomStream split(std::uint64_t index) {
        return RandomStream(derive_seed(engine_(), index));
    }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1) with 53 bits of precision.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform in the open interval (0, 1).
    double uniform_open() {
        double u;
        do {
            u = uniform();
        } while (u == 0.0);
        return u;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n). Rejection sampling, no modulo bias.
    std::size_t below(std::size_t n) {
        if (n == 0) throw std::invalid_argument("RandomStream::below: empty range");
        const std::uint64_t bound = static_cast<std::uint64_t>(n);
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                    std::numeric_limits<std::uint64_t>::max() % bound;
        std::uint64_t r;
        do {
            r = engine_();
        } while (r >= limit);
        return static_cast<std::size_t>(r % bound);
    }

    /// Uniform integer in the closed range [lo, hi].
    std::int64_t between(std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(below(static_cast<std::size_t>(hi - lo + 1)));
    }

    bool coin() { return (engine_() >> 63) != 0; }

    /// Standard normal deviate (Marsaglia polar method, spare value cached).
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        has_spare_ = true;
        return u * m;
    }

    double normal(double mean, double sigma) { return mean + sigma * normal(); }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[below(i)]);
        }
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

inline void require_comparable(double a, double b) {
    if (std::isnan(a) || std::isnan(b)) {
        throw std::domain_error("fitness comparison involving NaN");
    }
}

/// Strictly better under `d`. Infinities compare naturally, so +Inf always
/// loses under minimization and -Inf always loses under maximization.
inline bool better(double a, double b, Direction d) {
    require_comparable(a, b);
    return d == Direction::Minimize ? a < b : a > b;
}

inline bool better_or_equal(double a, double b, Direction d) {
    require_comparable(a, b);
    return d == Direction::Minimize ? a <= b : a >= b;
}

struct Problem {
    int id = 0;
    std::string name;
    std::size_t dimensionality = 1;
    double lower_bound = -1.0;
    double upper_bound = 1.0;
    Direction direction = Direction::Minimize;
    std::function<double(std::span<const double>)> objective;

    double range() const { return upper_bound - lower_bound; }

    /// Evaluates the objective; NaN results abort with a diagnostic.
    double evaluate(std::span<const double> x) const {
        const double f = objective(x);
        if (std::isnan(f)) {
            throw std::domain_error("objective '" + name + "' returned NaN");
        }
        return f;
    }

    bool contains(std::span<const double> x) const {
        if (x.size() != dimensionality) return false;
        for (double g : x) {
            if (!(g >= lower_bound && g <= upper_bound)) return false;
        }
        return true;
    }
};

inline void validate(const Problem& p) {
    if (p.dimensionality == 0) throw std::invalid_argument("problem dimensionality must be positive");
    if (!(p.lower_bound < p.upper_bound)) throw std::invalid_argument("problem requires lower_bound < upper_bound");
    if (!p.objective) throw std::invalid_argument("problem has no objective");
}

inline double clamp_gene(double g, const Problem& p) {
    return std::min(p.upper_bound, std::max(p.lower_bound, g));
}

inline void clamp_in_place(RealGenome& genome, const Problem& p) {
    for (double& g : genome) g = clamp_gene(g, p);
}

inline RealGenome clamp(RealGenome genome, const Problem& p) {
    clamp_in_place(genome, p);
    return genome;
}

/// Genome plus its cached objective value. Immutable once built.
class Individual {
public:
    Individual(RealGenome genome, const Problem& p)
        : genome_(std::move(genome)), fitness_(p.evaluate(genome_)) {}

    const RealGenome& genome() const { return genome_; }
    double fitness() const { return fitness_; }

private:
    RealGenome genome_;
    double fitness_;
};

using Population = std::vector<Individual>;

inline RealGenome random_genome(const Problem& p, RandomStream& rng) {
    RealGenome g(p.dimensionality);
    for (double& x : g) x = rng.uniform(p.lower_bound, p.upper_bound);
    return g;
}

inline Population init_population(const Problem& p, std::size_t size, RandomStream& rng) {
    if (size < 2) throw std::invalid_argument("population size must be at least 2");
    validate(p);
    Population pop;
    pop.reserve(size);
    for (std::size_t i = 0; i < size; ++i) pop.emplace_back(random_genome(p, rng), p);
    return pop;
}

inline std::size_t best_index(const Population& pop, Direction d) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < pop.size(); ++i) {
        if (better(pop[i].fitness(), pop[best].fitness(), d)) best = i;
    }
    return best;
}

/// Median of a sample; mean of the two middle values for even sizes.
inline double median(std::vector<double> v) {
    if (v.empty()) throw std::invalid_argument("median of empty sample");
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    double m = v[mid];
    if (v.size() % 2 == 0) {
        m = (m + *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid))) / 2.0;
    }
    return m;
}

inline double median_fitness(const Population& pop) {
    std::vector<double> f;
    f.reserve(pop.size());
    for (const auto& ind : pop) f.push_back(ind.fitness());
    return median(std::move(f));
}

}  // namespace aoea
