#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <set>

#include "aoea/core.hpp"

using namespace aoea;

namespace {

Problem sphere(std::size_t dim, double lo = -1.0, double hi = 1.0) {
    Problem p;
    p.name = "sphere";
    p.dimensionality = dim;
    p.lower_bound = lo;
    p.upper_bound = hi;
    p.objective = [](std::span<const double> x) {
        double s = 0.0;
        for (double v : x) s += v * v;
        return s;
    };
    return p;
}

}  // namespace

TEST(RandomStream, SameSeedSameSequence) {
    RandomStream a(123), b(123), c(124);
    bool differs = false;
    for (int i = 0; i < 100; ++i) {
        const auto x = a.next_u64();
        EXPECT_EQ(x, b.next_u64());
        differs = differs || x != c.next_u64();
    }
    EXPECT_TRUE(differs);
}

TEST(RandomStream, SplitIsDeterministicAndDistinct) {
    RandomStream a(9), b(9);
    auto ca = a.split(1);
    auto cb = b.split(1);
    EXPECT_EQ(ca.next_u64(), cb.next_u64());
    RandomStream d(9);
    auto c2 = d.split(2);
    RandomStream e(9);
    auto c1 = e.split(1);
    EXPECT_NE(c1.next_u64(), c2.next_u64());
}

TEST(RandomStream, UniformRanges) {
    RandomStream r(5);
    for (int i = 0; i < 10000; ++i) {
        const double u = r.uniform();
        EXPECT_GE(u, 0.0);
        EXPECT_LT(u, 1.0);
        const double o = r.uniform_open();
        EXPECT_GT(o, 0.0);
        EXPECT_LT(o, 1.0);
        const double w = r.uniform(-3.0, 2.0);
        EXPECT_GE(w, -3.0);
        EXPECT_LT(w, 2.0);
        EXPECT_LT(r.below(7), 7u);
        const auto k = r.between(-2, 2);
        EXPECT_GE(k, -2);
        EXPECT_LE(k, 2);
    }
    EXPECT_THROW(r.below(0), std::invalid_argument);
}

TEST(RandomStream, BelowIsRoughlyUniform) {
    RandomStream r(77);
    std::vector<int> counts(5, 0);
    const int n = 50000;
    for (int i = 0; i < n; ++i) ++counts[r.below(5)];
    const double expected = n / 5.0;
    const double sigma = std::sqrt(n * 0.2 * 0.8);
    for (int c : counts) EXPECT_NEAR(c, expected, 4 * sigma);
}

TEST(RandomStream, NormalMoments) {
    RandomStream r(3);
    const int n = 100000;
    double s = 0.0, ss = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = r.normal(2.0, 0.5);
        s += z;
        ss += z * z;
    }
    const double mean = s / n;
    const double var = ss / n - mean * mean;
    EXPECT_NEAR(mean, 2.0, 0.01);
    EXPECT_NEAR(var, 0.25, 0.01);
}

TEST(RandomStream, ShuffleIsPermutation) {
    RandomStream r(1);
    std::vector<int> v{0, 1, 2, 3, 4, 5, 6, 7};
    r.shuffle(v);
    EXPECT_EQ(std::set<int>(v.begin(), v.end()).size(), 8u);
}

TEST(DeriveSeed, DependsOnEveryComponent) {
    EXPECT_EQ(derive_seed(1, 2, 3), derive_seed(1, 2, 3));
    EXPECT_NE(derive_seed(1, 2, 3), derive_seed(1, 3, 2));
    EXPECT_NE(derive_seed(1, 2), derive_seed(2, 2));
}

TEST(Fitness, Comparisons) {
    EXPECT_TRUE(better(1.0, 2.0, Direction::Minimize));
    EXPECT_FALSE(better(2.0, 2.0, Direction::Minimize));
    EXPECT_TRUE(better_or_equal(2.0, 2.0, Direction::Minimize));
    EXPECT_TRUE(better(3.0, 2.0, Direction::Maximize));
    const double inf = std::numeric_limits<double>::infinity();
    EXPECT_TRUE(better(1.0, inf, Direction::Minimize));
    EXPECT_TRUE(better(1.0, -inf, Direction::Maximize));
    EXPECT_THROW(better(std::nan(""), 1.0, Direction::Minimize), std::domain_error);
    EXPECT_THROW(better_or_equal(1.0, std::nan(""), Direction::Maximize), std::domain_error);
}

TEST(Problem, EvaluateAndContains) {
    const Problem p = sphere(3);
    EXPECT_DOUBLE_EQ(p.evaluate(std::vector<double>{1, 0, 0}), 1.0);
    EXPECT_TRUE(p.contains(std::vector<double>{1, -1, 0}));
    EXPECT_FALSE(p.contains(std::vector<double>{1.5, 0, 0}));
    EXPECT_FALSE(p.contains(std::vector<double>{0, 0}));
    Problem bad = p;
    bad.objective = [](std::span<const double>) { return std::nan(""); };
    EXPECT_THROW(bad.evaluate(std::vector<double>{0, 0, 0}), std::domain_error);
}

TEST(Problem, Validate) {
    Problem p = sphere(2);
    EXPECT_NO_THROW(validate(p));
    p.lower_bound = 1.0;
    EXPECT_THROW(validate(p), std::invalid_argument);
    p = sphere(0);
    EXPECT_THROW(validate(p), std::invalid_argument);
    p = sphere(2);
    p.objective = nullptr;
    EXPECT_THROW(validate(p), std::invalid_argument);
}

TEST(Clamp, ProjectsIntoBounds) {
    const Problem p = sphere(3, -2.0, 2.0);
    EXPECT_EQ(clamp(RealGenome{-5.0, 0.5, 9.0}, p), (RealGenome{-2.0, 0.5, 2.0}));
}

TEST(Population, InitIsFeasibleAndSeeded) {
    const Problem p = sphere(4);
    RandomStream a(11), b(11);
    const auto pa = init_population(p, 10, a);
    const auto pb = init_population(p, 10, b);
    ASSERT_EQ(pa.size(), 10u);
    for (std::size_t i = 0; i < pa.size(); ++i) {
        EXPECT_TRUE(p.contains(pa[i].genome()));
        EXPECT_EQ(pa[i].genome(), pb[i].genome());
        EXPECT_DOUBLE_EQ(pa[i].fitness(), p.evaluate(pa[i].genome()));
    }
    RandomStream c(1);
    EXPECT_THROW(init_population(p, 1, c), std::invalid_argument);
}

TEST(Population, BestAndMedian) {
    const Problem p = sphere(1, -10, 10);
    Population pop{Individual({3.0}, p), Individual({1.0}, p), Individual({2.0}, p)};
    EXPECT_EQ(best_index(pop, Direction::Minimize), 1u);
    EXPECT_EQ(best_index(pop, Direction::Maximize), 0u);
    EXPECT_DOUBLE_EQ(median_fitness(pop), 4.0);
    EXPECT_DOUBLE_EQ(median({4.0, 1.0, 3.0, 2.0}), 2.5);
    EXPECT_THROW(median({}), std::invalid_argument);
}
