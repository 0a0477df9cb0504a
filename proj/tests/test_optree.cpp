#include <gtest/gtest.h>

#include <map>

#include "aoea/benchmarks.hpp"
#include "aoea/optree.hpp"
#include "support.hpp"

using namespace aoea;

namespace {

const Problem& box() {
    static const Problem p = benchmarks::make_problem(1, 5);
    return p;
}

OperatorTree L0() { return OperatorTree::leaf(AtomicOp::NullFirst); }
OperatorTree L1() { return OperatorTree::leaf(AtomicOp::NullSecond); }

void expect_valid(const OperatorTree& t) {
    EXPECT_FALSE(OperatorTree::structural_error(t.preorder()).has_value()) << serialize(t);
    EXPECT_GE(t.size(), 1u);
}

}  // namespace

TEST(OperatorTree, Construction) {
    const OperatorTree t;
    EXPECT_EQ(t.size(), 1u);
    EXPECT_EQ(t.label(0), AtomicOp::NullFirst);
    EXPECT_THROW(OperatorTree(std::vector<AtomicOp>{}), std::invalid_argument);
    EXPECT_THROW(OperatorTree({AtomicOp::AverageCrossover, AtomicOp::NullFirst}), std::invalid_argument);
    EXPECT_THROW(OperatorTree({AtomicOp::NullFirst, AtomicOp::NullFirst}), std::invalid_argument);
    EXPECT_THROW(OperatorTree({AtomicOp::SwapGenes}), std::invalid_argument);
}

TEST(OperatorTree, SizeAndDepth) {
    EXPECT_EQ(tree_size(L0()), 1u);
    EXPECT_EQ(tree_depth(L0()), 1);
    // Six nodes, depth 3: binary root over (binary over two leaves) and (unary over a leaf).
    const auto t = OperatorTree::binary(AtomicOp::UniformCrossover,
                                        OperatorTree::binary(AtomicOp::AverageCrossover, L0(), L1()),
                                        OperatorTree::unary(AtomicOp::GaussianNoise, L0()));
    EXPECT_EQ(tree_size(t), 6u);
    EXPECT_EQ(tree_depth(t), 3);
    EXPECT_EQ(t.children(0), (std::vector<std::size_t>{1, 4}));
    EXPECT_EQ(t.subtree_size(1), 3u);
    const auto bigger = t.with_subtree(5, OperatorTree::unary(AtomicOp::SwapGenes, L1()).preorder());
    EXPECT_GT(tree_size(bigger), tree_size(t));
}

TEST(OperatorTree, EvaluationExamples) {
    RandomStream rng(1);
    const RealGenome a{1, 2, 3, 4, 5}, b{-1, 0, 1, 0, -1};
    EXPECT_EQ(evaluate_tree(L0(), a, b, box(), rng), a);
    EXPECT_EQ(evaluate_tree(L1(), a, b, box(), rng), b);
    const auto avg = OperatorTree::binary(AtomicOp::AverageCrossover, L0(), L1());
    const auto r1 = evaluate_tree(avg, a, b, box(), rng);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_DOUBLE_EQ(r1[i], (a[i] + b[i]) / 2);
    const auto nested = OperatorTree::binary(AtomicOp::AverageCrossover, avg, L1());
    const auto r2 = evaluate_tree(nested, a, b, box(), rng);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_DOUBLE_EQ(r2[i], (a[i] + 3 * b[i]) / 4);
    EXPECT_THROW(evaluate_tree(avg, a, RealGenome{1}, box(), rng), std::invalid_argument);
}

TEST(OperatorTree, UnaryChildIsEvaluatedFirst) {
    RandomStream rng(2);
    const RealGenome a{1, 2, 3, 4, 5}, b(5, 0.0);
    // swap(NullSecond) must act on B: the output is a permutation of B.
    const auto t = OperatorTree::unary(AtomicOp::SwapGenes, L1());
    EXPECT_EQ(evaluate_tree(t, a, b, box(), rng), b);
}

TEST(OperatorTree, NullFirstIsLeftIdentity) {
    RandomStream rng(3);
    for (int i = 0; i < 10000; ++i) {
        RealGenome a(5), b(5);
        for (auto& g : a) g = rng.uniform(-5.12, 5.12);
        for (auto& g : b) g = rng.uniform(-5.12, 5.12);
        ASSERT_EQ(evaluate_tree(L0(), a, b, box(), rng), a);
    }
}

TEST(OperatorTree, SerializeRoundTrip) {
    EXPECT_EQ(serialize(L0()), "(0)");
    const auto t = OperatorTree::binary(AtomicOp::LinearCrossover, OperatorTree::unary(AtomicOp::SwapGenes, L1()), L0());
    EXPECT_EQ(serialize(t), "(7 (2 (1)) (0))");
    EXPECT_EQ(parse_tree("(7 (2 (1)) (0))"), t);
    EXPECT_EQ(parse_tree("  ( 7 (2 (1))(0) ) "), t);
    EXPECT_THROW(parse_tree("(7 (0))"), std::invalid_argument);
    EXPECT_THROW(parse_tree("(9)"), std::exception);
    EXPECT_THROW(parse_tree("(0) x"), std::invalid_argument);
    EXPECT_THROW(parse_tree(""), std::invalid_argument);
    RandomStream rng(4);
    for (int i = 0; i < 10000; ++i) {
        const auto r = random_tree(6, rng);
        ASSERT_EQ(parse_tree(serialize(r)), r);
    }
}

TEST(RandomTree, DepthAndLeafFlags) {
    RandomStream rng(5);
    EXPECT_EQ(random_tree(1, rng).size(), 1u);
    EXPECT_THROW(random_tree(0, rng), std::invalid_argument);
    long first = 0, leaves = 0;
    std::map<int, int> depths;
    for (int i = 0; i < 10000; ++i) {
        const auto t = random_tree(4, rng);
        expect_valid(t);
        ++depths[t.depth()];
        for (AtomicOp op : t.preorder()) {
            if (!is_null(op)) continue;
            ++leaves;
            first += op == AtomicOp::NullFirst;
        }
    }
    for (const auto& [d, _] : depths) {
        EXPECT_GE(d, 1);
        EXPECT_LE(d, 4);
    }
    EXPECT_NEAR(static_cast<double>(first) / leaves, 0.5, 3 * std::sqrt(0.25 / leaves));
}

TEST(RandomNode, SingleNode) {
    RandomStream rng(6);
    for (int i = 0; i < 100; ++i) EXPECT_EQ(random_node(L0(), rng), 0u);
}

TEST(RandomNode, TwoNodeBinomial) {
    RandomStream rng(7);
    const auto t = OperatorTree::unary(AtomicOp::GaussianNoise, L0());
    const int n = 10000;
    int root = 0;
    for (int i = 0; i < n; ++i) root += random_node(t, rng) == 0;
    EXPECT_NEAR(root, n / 2.0, 3 * std::sqrt(n * 0.25));
}

TEST(RandomNode, ChiSquareUniformity) {
    RandomStream rng(8);
    const auto t = parse_tree("(5 (6 (0) (1)) (4 (0) (1)))");
    ASSERT_EQ(t.size(), 7u);
    std::vector<long> counts(7, 0);
    for (int i = 0; i < 70000; ++i) ++counts[random_node(t, rng)];
    const double chi = oracle::chi_square_stat(counts, 10000.0);
    EXPECT_GT(oracle::chi_square_sf(chi, 6), 0.001) << "chi-square " << chi;
}

TEST(ChiSquare, ReferenceValues) {
    // Upper 0.001 critical value for 6 degrees of freedom is 22.458.
    EXPECT_NEAR(oracle::chi_square_sf(22.458, 6), 0.001, 2e-6);
    EXPECT_NEAR(oracle::chi_square_sf(2.0, 2), std::exp(-1.0), 1e-12);
}

TEST(MutateTree, Examples) {
    RandomStream rng(9);
    bool saw_first = false, saw_second = false;
    for (int i = 0; i < 200; ++i) {
        const auto m = mutate_tree(L0(), rng);
        ASSERT_EQ(m.size(), 1u);
        saw_first = saw_first || m.label(0) == AtomicOp::NullFirst;
        saw_second = saw_second || m.label(0) == AtomicOp::NullSecond;
    }
    EXPECT_TRUE(saw_first && saw_second);
}

TEST(MutateTree, PreservesShapeAndArity) {
    RandomStream rng(10);
    for (int i = 0; i < 10000; ++i) {
        const auto t = random_tree(5, rng);
        const auto m = mutate_tree(t, rng);
        ASSERT_EQ(m.size(), t.size());
        ASSERT_EQ(m.depth(), t.depth());
        int changed = 0;
        for (std::size_t k = 0; k < t.size(); ++k) {
            ASSERT_EQ(child_count(m.label(k)), child_count(t.label(k)));
            ASSERT_EQ(is_null(m.label(k)), is_null(t.label(k)));
            changed += m.label(k) != t.label(k);
        }
        ASSERT_LE(changed, 1);
    }
}

TEST(MutateTree, SeededReplay) {
    RandomStream a(11), b(11);
    const auto t = parse_tree("(5 (6 (0) (1)) (3 (1)))");
    EXPECT_EQ(mutate_tree(t, a), mutate_tree(t, b));
}

TEST(RecombineTrees, RootSwapAndConservation) {
    const auto p1 = parse_tree("(6 (0) (1))");
    const auto p2 = parse_tree("(2 (3 (1)))");
    // Single-leaf parents have only the root to choose.
    RandomStream rng(12);
    auto [c1, c2] = recombine_trees(L0(), L1(), rng);
    EXPECT_EQ(c1, L1());
    EXPECT_EQ(c2, L0());
    for (int i = 0; i < 1000; ++i) {
        auto [a, b] = recombine_trees(p1, p2, rng);
        EXPECT_EQ(a.size() + b.size(), p1.size() + p2.size());
    }
}

TEST(RecombineTrees, BloatCap) {
    RandomStream rng(13);
    const auto big = random_tree(8, rng);
    for (int i = 0; i < 500; ++i) {
        auto [a, b] = recombine_trees(big, big, rng, big.size());
        EXPECT_LE(a.size(), big.size());
        EXPECT_LE(b.size(), big.size());
    }
    // With no admissible swap the parents come back unchanged.
    const auto p1 = parse_tree("(6 (0) (1))");
    const auto p2 = parse_tree("(2 (0))");
    auto [a, b] = recombine_trees(p1, p2, rng, 1);
    EXPECT_EQ(a, p1);
    EXPECT_EQ(b, p2);
}

TEST(RecombineTrees, SeededReplay) {
    RandomStream a(14), b(14);
    const auto p1 = parse_tree("(5 (6 (0) (1)) (3 (1)))");
    const auto p2 = parse_tree("(7 (2 (1)) (0))");
    EXPECT_EQ(recombine_trees(p1, p2, a), recombine_trees(p1, p2, b));
}

// Random sequences of mutation and recombination keep every tree valid and
// every evaluation feasible.
TEST(OperatorTree, InvariantsUnderRandomOperations) {
    RandomStream rng(15);
    std::vector<OperatorTree> pool;
    for (int i = 0; i < 16; ++i) pool.push_back(random_tree(4, rng));
    const RealGenome a{5.12, -5.12, 0, 1, 2}, b{-1, 1, -5.12, 5.12, 0};
    for (int step = 0; step < 10000; ++step) {
        const std::size_t i = rng.below(pool.size());
        if (rng.coin()) {
            pool[i] = mutate_tree(pool[i], rng);
        } else {
            const std::size_t j = rng.below(pool.size());
            auto [c1, c2] = recombine_trees(pool[i], pool[j], rng, 64);
            pool[i] = c1;
            pool[j] = c2;
        }
        ASSERT_FALSE(OperatorTree::structural_error(pool[i].preorder()).has_value());
        ASSERT_LE(pool[i].size(), 64u);
        if (step % 100 == 0) {
            const auto out = evaluate_tree(pool[i], a, b, box(), rng);
            ASSERT_TRUE(box().contains(out));
        }
    }
}
