#pragma once

/// @file atomic_ops.hpp
/// @brief Fixed pool of atomic genome operators: the two null leaves, two
/// unary (mutation-like) and four binary (crossover-like) transformations.

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

#include "aoea/core.hpp"

namespace aoea {

/// Stable ids; these appear in serialized operator trees.
enum class AtomicOp : std::uint8_t {
    NullFirst = 0,
    NullSecond = 1,
    SwapGenes = 2,
    GaussianNoise = 3,
    SinglePointCrossover = 4,
    UniformCrossover = 5,
    AverageCrossover = 6,
    LinearCrossover = 7,
};

inline constexpr std::size_t kAtomicOpCount = 8;

struct AtomicOpDescriptor {
    AtomicOp op;
    std::string_view name;
    int arity;
};

inline constexpr std::array<AtomicOpDescriptor, kAtomicOpCount> kAtomicOps{{
    {AtomicOp::NullFirst, "null-first", 2},
    {AtomicOp::NullSecond, "null-second", 2},
    {AtomicOp::SwapGenes, "swap-genes", 1},
    {AtomicOp::GaussianNoise, "gaussian-noise", 1},
    {AtomicOp::SinglePointCrossover, "single-point-crossover", 2},
    {AtomicOp::UniformCrossover, "uniform-crossover", 2},
    {AtomicOp::AverageCrossover, "average-crossover", 2},
    {AtomicOp::LinearCrossover, "linear-crossover", 2},
}};

/// The six user-level operators (everything except the null leaves).
inline constexpr std::array<AtomicOp, 6> kUserOps{
    AtomicOp::SwapGenes,          AtomicOp::GaussianNoise,    AtomicOp::SinglePointCrossover,
    AtomicOp::UniformCrossover,   AtomicOp::AverageCrossover, AtomicOp::LinearCrossover,
};

inline constexpr std::array<AtomicOp, 2> kNullOps{AtomicOp::NullFirst, AtomicOp::NullSecond};
inline constexpr std::array<AtomicOp, 2> kUnaryOps{AtomicOp::SwapGenes, AtomicOp::GaussianNoise};
inline constexpr std::array<AtomicOp, 4> kBinaryOps{
    AtomicOp::SinglePointCrossover, AtomicOp::UniformCrossover, AtomicOp::AverageCrossover,
    AtomicOp::LinearCrossover};

constexpr const AtomicOpDescriptor& descriptor(AtomicOp op) { return kAtomicOps[static_cast<std::size_t>(op)]; }
constexpr int arity(AtomicOp op) { return descriptor(op).arity; }
constexpr bool is_null(AtomicOp op) { return op == AtomicOp::NullFirst || op == AtomicOp::NullSecond; }

inline AtomicOp atomic_from_id(int id) {
    if (id < 0 || id >= static_cast<int>(kAtomicOpCount)) {
        throw std::out_of_range("unknown atomic operator id " + std::to_string(id));
    }
    return static_cast<AtomicOp>(id);
}

/// Standard deviation of GaussianNoise: a tenth of the search interval.
inline double gaussian_sigma(const Problem& p) { return 0.1 * p.range(); }

namespace ops {

inline void require_same_dim(const RealGenome& a, const RealGenome& b) {
    if (a.size() != b.size()) throw std::invalid_argument("atomic operator: dimensionality mismatch");
}

inline RealGenome swap_genes(RealGenome a, RandomStream& rng) {
    const std::size_t n = a.size();
    if (n < 2) return a;
    const std::size_t i = rng.below(n);
    std::size_t j = rng.below(n - 1);
    if (j >= i) ++j;
    std::swap(a[i], a[j]);
    return a;
}

inline RealGenome gaussian_noise(RealGenome a, const Problem& p, RandomStream& rng) {
    const std::size_t i = rng.below(a.size());
    a[i] = clamp_gene(a[i] + rng.normal(0.0, gaussian_sigma(p)), p);
    return a;
}

/// Genes [0, cut) from a, [cut, n) from b.
inline RealGenome single_point_crossover(RealGenome a, const RealGenome& b, std::size_t cut) {
    require_same_dim(a, b);
    if (cut > a.size()) throw std::invalid_argument("single point crossover: cut beyond genome");
    std::copy(b.begin() + static_cast<std::ptrdiff_t>(cut), b.end(), a.begin() + static_cast<std::ptrdiff_t>(cut));
    return a;
}

inline RealGenome single_point_crossover(RealGenome a, const RealGenome& b, RandomStream& rng) {
    require_same_dim(a, b);
    if (a.size() < 2) return a;
    const auto cut = static_cast<std::size_t>(rng.between(1, static_cast<std::int64_t>(a.size()) - 1));
    return single_point_crossover(std::move(a), b, cut);
}

inline RealGenome uniform_crossover(RealGenome a, const RealGenome& b, RandomStream& rng) {
    require_same_dim(a, b);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (rng.coin()) a[i] = b[i];
    }
    return a;
}

inline RealGenome average_crossover(RealGenome a, const RealGenome& b) {
    require_same_dim(a, b);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = 0.5 * (a[i] + b[i]);
    return a;
}

/// w*a + (1-w)*b, clamped.
inline RealGenome linear_crossover(RealGenome a, const RealGenome& b, double w, const Problem& p) {
    require_same_dim(a, b);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = clamp_gene(w * a[i] + (1.0 - w) * b[i], p);
    return a;
}

inline RealGenome linear_crossover(RealGenome a, const RealGenome& b, const Problem& p, RandomStream& rng) {
    const double w = rng.uniform();
    return linear_crossover(std::move(a), b, w, p);
}

}  // namespace ops

/// Applies one atomic operator. `b` must be non-null exactly for arity-2
/// operators. The first argument is taken by value so callers can move
/// intermediate genomes through a chain of operators without copying.
inline RealGenome apply_atomic(AtomicOp op, RealGenome a, const RealGenome* b, const Problem& p,
                               RandomStream& rng) {
    const bool binary = arity(op) == 2;
    if (binary != (b != nullptr)) {
        throw std::invalid_argument(std::string("atomic operator '") + std::string(descriptor(op).name) +
                                    "': argument count does not match arity");
    }
    if (b != nullptr) ops::require_same_dim(a, *b);
    switch (op) {
        case AtomicOp::NullFirst: return a;
        case AtomicOp::NullSecond: return *b;
        case AtomicOp::SwapGenes: return ops::swap_genes(std::move(a), rng);
        case AtomicOp::GaussianNoise: return ops::gaussian_noise(std::move(a), p, rng);
        case AtomicOp::SinglePointCrossover: return ops::single_point_crossover(std::move(a), *b, rng);
        case AtomicOp::UniformCrossover: return ops::uniform_crossover(std::move(a), *b, rng);
        case AtomicOp::AverageCrossover: return ops::average_crossover(std::move(a), *b);
        case AtomicOp::LinearCrossover: return ops::linear_crossover(std::move(a), *b, p, rng);
    }
    throw std::logic_error("unreachable atomic operator");
}

inline RealGenome apply_atomic(AtomicOp op, const RealGenome& a, const Problem& p, RandomStream& rng) {
    return apply_atomic(op, RealGenome(a), nullptr, p, rng);
}

inline RealGenome apply_atomic(AtomicOp op, const RealGenome& a, const RealGenome& b, const Problem& p,
                               RandomStream& rng) {
    return apply_atomic(op, RealGenome(a), &b, p, rng);
}

}  // namespace aoea
