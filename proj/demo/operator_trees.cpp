// Builds, evaluates, mutates and recombines operator trees by hand.

#include <cstdio>

#include "aoea/aoea.hpp"

int main() {
    using namespace aoea;
    const Problem p = benchmarks::make_problem(1, 4);
    RandomStream rng(42);

    // average(average(A, B), B) = (A + 3B) / 4
    const OperatorTree t = parse_tree("(6 (6 (0) (1)) (1))");
    const RealGenome a{1, 1, 1, 1}, b{-1, -1, -1, -1};
    const RealGenome child = evaluate_tree(t, a, b, p, rng);
    std::printf("%s on A=1, B=-1 -> %g\n", serialize(t).c_str(), child[0]);

    const OperatorTree m = mutate_tree(t, rng);
    std::printf("mutated:    %s\n", serialize(m).c_str());

    const OperatorTree other = random_tree(4, rng);
    auto [c1, c2] = recombine_trees(t, other, rng);
    std::printf("partner:    %s\nchildren:   %s\n            %s\n", serialize(other).c_str(), serialize(c1).c_str(),
                serialize(c2).c_str());
    std::printf("distance(parent, child) = %zu\n", analysis::tree_edit_distance(t, c1));
}
