#include <gtest/gtest.h>

#include <algorithm>

#include "aoea/atomic_ops.hpp"
#include "aoea/benchmarks.hpp"

using namespace aoea;

namespace {

const Problem& cube() {
    static const Problem p = benchmarks::make_problem(1, 6);  // [-5.12, 5.12]^6
    return p;
}

}  // namespace

TEST(AtomicOps, Descriptors) {
    EXPECT_EQ(kAtomicOps.size(), 8u);
    for (std::size_t i = 0; i < kAtomicOps.size(); ++i) EXPECT_EQ(static_cast<std::size_t>(kAtomicOps[i].op), i);
    EXPECT_TRUE(is_null(AtomicOp::NullFirst));
    EXPECT_EQ(arity(AtomicOp::SwapGenes), 1);
    EXPECT_EQ(arity(AtomicOp::LinearCrossover), 2);
    EXPECT_EQ(atomic_from_id(5), AtomicOp::UniformCrossover);
    EXPECT_THROW(atomic_from_id(8), std::out_of_range);
    EXPECT_THROW(atomic_from_id(-1), std::out_of_range);
}

TEST(AtomicOps, NullOperators) {
    RandomStream rng(1);
    const RealGenome a{1, 2, 3, 4, 5, 0}, b{-1, -2, -3, -4, -5, 0};
    EXPECT_EQ(apply_atomic(AtomicOp::NullFirst, a, b, cube(), rng), a);
    EXPECT_EQ(apply_atomic(AtomicOp::NullSecond, a, b, cube(), rng), b);
}

TEST(AtomicOps, SwapGenesPermutes) {
    RandomStream rng(2);
    const RealGenome a{1, 2, 3, 4, 5, 0};
    for (int i = 0; i < 100; ++i) {
        const auto c = apply_atomic(AtomicOp::SwapGenes, a, cube(), rng);
        int moved = 0;
        for (std::size_t k = 0; k < a.size(); ++k) moved += c[k] != a[k];
        EXPECT_EQ(moved, 2);
        auto sa = a, sc = c;
        std::sort(sa.begin(), sa.end());
        std::sort(sc.begin(), sc.end());
        EXPECT_EQ(sa, sc);
    }
    EXPECT_EQ(ops::swap_genes(RealGenome{3.0}, rng), RealGenome{3.0});
}

TEST(AtomicOps, GaussianNoiseTouchesOneGene) {
    RandomStream rng(3);
    const RealGenome a(6, 0.0);
    for (int i = 0; i < 100; ++i) {
        const auto c = apply_atomic(AtomicOp::GaussianNoise, a, cube(), rng);
        int moved = 0;
        for (std::size_t k = 0; k < a.size(); ++k) moved += c[k] != a[k];
        EXPECT_LE(moved, 1);
    }
    EXPECT_DOUBLE_EQ(gaussian_sigma(cube()), 0.1 * 10.24);
}

TEST(AtomicOps, SinglePointCrossover) {
    const RealGenome a{1, 1, 1, 1}, b{2, 2, 2, 2};
    EXPECT_EQ(ops::single_point_crossover(a, b, 1), (RealGenome{1, 2, 2, 2}));
    EXPECT_EQ(ops::single_point_crossover(a, b, 3), (RealGenome{1, 1, 1, 2}));
    EXPECT_THROW(ops::single_point_crossover(a, b, 5), std::invalid_argument);
    RandomStream rng(4);
    for (int i = 0; i < 100; ++i) {
        const auto c = ops::single_point_crossover(a, b, rng);
        EXPECT_EQ(c.front(), 1.0);
        EXPECT_EQ(c.back(), 2.0);
        EXPECT_TRUE(std::is_sorted(c.begin(), c.end()));
    }
    EXPECT_EQ(ops::single_point_crossover(RealGenome{1}, RealGenome{2}, rng), RealGenome{1});
}

TEST(AtomicOps, UniformAndAverage) {
    RandomStream rng(5);
    const RealGenome a{1, 1, 1, 1}, b{3, 3, 3, 3};
    const auto u = ops::uniform_crossover(a, b, rng);
    for (double g : u) EXPECT_TRUE(g == 1.0 || g == 3.0);
    EXPECT_EQ(ops::average_crossover(a, b), RealGenome(4, 2.0));
}

TEST(AtomicOps, LinearCrossoverWeights) {
    const RealGenome a{1, 1}, b{3, 3};
    EXPECT_EQ(ops::linear_crossover(a, b, 1.0, cube()), a);
    EXPECT_EQ(ops::linear_crossover(a, b, 0.0, cube()), b);
    EXPECT_EQ(ops::linear_crossover(a, b, 0.25, cube()), RealGenome(2, 2.5));
}

TEST(AtomicOps, ArityMismatchThrows) {
    RandomStream rng(6);
    const RealGenome a(6, 0.0);
    EXPECT_THROW(apply_atomic(AtomicOp::AverageCrossover, a, cube(), rng), std::invalid_argument);
    EXPECT_THROW(apply_atomic(AtomicOp::SwapGenes, a, a, cube(), rng), std::invalid_argument);
    EXPECT_THROW(apply_atomic(AtomicOp::UniformCrossover, a, RealGenome(5, 0.0), cube(), rng), std::invalid_argument);
}

// Feasible inputs always give feasible outputs of the same dimensionality.
TEST(AtomicOps, BoundClosureRandomized) {
    RandomStream rng(7);
    const Problem& p = cube();
    for (int trial = 0; trial < 10000; ++trial) {
        RealGenome a(p.dimensionality), b(p.dimensionality);
        for (std::size_t i = 0; i < a.size(); ++i) {
            // Include the bounds themselves.
            a[i] = rng.coin() ? rng.uniform(p.lower_bound, p.upper_bound) : (rng.coin() ? p.lower_bound : p.upper_bound);
            b[i] = rng.uniform(p.lower_bound, p.upper_bound);
        }
        const auto op = kAtomicOps[rng.below(kAtomicOps.size())].op;
        const auto c = arity(op) == 2 ? apply_atomic(op, a, b, p, rng) : apply_atomic(op, a, p, rng);
        ASSERT_TRUE(p.contains(c)) << descriptor(op).name;
    }
}
