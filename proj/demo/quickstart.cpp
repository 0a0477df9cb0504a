// Runs the three algorithms on a small Rastrigin instance and prints the
// final best fitness plus the operator pool AOEA ended with.

#include <cstdio>

#include "aoea/aoea.hpp"

int main() {
    using namespace aoea;
    const Problem p = benchmarks::make_problem(benchmarks::resolve("rastrigin"), 30);

    EngineConfig c;
    c.population_size = 50;
    c.generations = 200;
    c.seed = 7;
    c.init_seed = 7;  // same starting population for every algorithm
    c.snapshot_every = 200;

    for (Algorithm a : kAlgorithms) {
        c.algorithm = a;
        const RunTrace t = run(p, c);
        std::printf("%-5s best %.6g after %zu evaluations\n", std::string(algorithm_name(a)).c_str(), t.best_fitness,
                    t.records.back().evaluations);
        if (a == Algorithm::AOEA) {
            const auto& last = t.records.back();
            for (std::size_t i = 0; i < last.trees.size(); ++i) {
                std::printf("  rate %.3f  %s\n", last.rates[i], last.trees[i].c_str());
            }
        }
    }
}
