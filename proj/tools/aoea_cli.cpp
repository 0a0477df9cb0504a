// Command-line front end: run experiment grids, write reports, analyze
// operator snapshots and compare result stores.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "aoea/aoea.hpp"

namespace {

using namespace aoea;
namespace ex = aoea::experiment;

struct RunOptions {
    std::string config;
    std::vector<std::string> functions;
    std::vector<std::string> algorithms;
    std::vector<std::size_t> pop_sizes;
    std::optional<std::size_t> generations, kappa, dim, reps, jobs, snapshot_every;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out, variant;
    bool force = false;
};

ex::ExperimentConfig build_config(const RunOptions& o) {
    ex::ExperimentConfig c = o.config.empty() ? ex::ExperimentConfig{} : ex::load_config(o.config);
    if (!o.functions.empty()) {
        c.functions.clear();
        for (const auto& f : o.functions) c.functions.push_back(benchmarks::resolve(f));
    }
    if (!o.algorithms.empty()) {
        c.algorithms.clear();
        for (const auto& a : o.algorithms) c.algorithms.push_back(parse_algorithm(a));
    }
    if (!o.pop_sizes.empty()) c.population_sizes = o.pop_sizes;
    if (o.generations) c.generations = *o.generations;
    if (o.kappa) c.kappa = *o.kappa;
    if (o.dim) c.dimensionality = *o.dim;
    if (o.reps) c.repetitions = *o.reps;
    if (o.jobs) c.jobs = *o.jobs;
    if (o.snapshot_every) c.snapshot_every = *o.snapshot_every;
    if (o.seed) c.seed = *o.seed;
    if (o.out) c.output = *o.out;
    if (o.variant) c.variant = benchmarks::parse_variant(*o.variant);
    c.force = o.force;
    return c;
}

int cmd_run(const RunOptions& o) {
    const auto cfg = build_config(o);
    std::printf("running %zu cells into %s (config %s)\n", ex::cells(cfg).size(), cfg.output.c_str(),
                ex::config_hash(cfg).c_str());
    const auto rep = ex::run_experiment(cfg, [](const ex::Cell& c, const ex::RunSummary& s, std::size_t done,
                                                std::size_t total) {
        std::printf("[%zu/%zu] %s best %.6g\n", done, total, ex::cell_name(c).c_str(), s.best_fitness);
        std::fflush(stdout);
    });
    std::printf("done: %zu executed, %zu already complete\n", rep.executed, rep.skipped);
    return 0;
}

int cmd_report(const std::string& store_dir, const std::vector<std::string>& kinds) {
    const auto store = ex::open_store(store_dir);
    std::vector<ex::ReportKind> wanted;
    if (kinds.empty()) {
        wanted.assign(ex::kReportKinds.begin(), ex::kReportKinds.end());
    } else {
        for (const auto& k : kinds) wanted.push_back(ex::parse_report_kind(k));
    }
    const auto out = ex::write_reports(store, wanted);
    for (const auto& f : out.files) std::printf("wrote %s\n", f.string().c_str());
    if (!out.gaps.empty()) std::printf("%zu gaps listed in reports/gaps.txt\n", out.gaps.size());
    return 0;
}

int cmd_analyze(const std::string& trees_path, const std::string& out_dir, std::uint64_t seed) {
    const auto snaps = ex::read_trees(trees_path);
    ex::fs::create_directories(out_dir);
    std::string emb = "generation,slot,x,y,stress\n";
    std::string div = "generation,mean_distance,mean_size\n";
    for (const auto& [gen, serialized] : snaps) {
        const auto trees = analysis::parse_snapshot(serialized);
        double size = 0.0;
        for (const auto& t : trees) size += static_cast<double>(t.size());
        size /= static_cast<double>(trees.size());
        if (trees.size() < 2) continue;
        const auto d = analysis::pairwise_distances(trees);
        RandomStream rng(derive_seed(seed, gen));
        const auto e = analysis::smacof_embed(d, rng);
        for (std::size_t i = 0; i < e.points.size(); ++i) {
            emb += std::to_string(gen) + "," + std::to_string(i) + "," + ex::fmt(e.points[i][0]) + "," +
                   ex::fmt(e.points[i][1]) + "," + ex::fmt(e.stress) + "\n";
        }
        div += std::to_string(gen) + "," + ex::fmt(d.mean_off_diagonal()) + "," + ex::fmt(size) + "\n";
    }
    ex::write_file_atomic(ex::fs::path(out_dir) / "embedding.csv", emb);
    ex::write_file_atomic(ex::fs::path(out_dir) / "diversity.csv", div);
    std::printf("analyzed %zu snapshots into %s\n", snaps.size(), out_dir.c_str());
    return 0;
}

int cmd_compare(const std::string& store_dir, const std::string& reference) {
    const auto store = ex::open_store(store_dir);
    const auto rep = ex::comparison(store);
    for (auto p : store.config.population_sizes) {
        std::printf("population %zu\n%s\n", p, ex::render_table(rep, p).c_str());
        for (const auto& row : rep.rows) {
            if (row.population != p) continue;
            for (const auto& t : row.tests) {
                const std::string name(benchmarks::spec(row.function).name);
                if (!t.result) {
                    std::printf("  %-24s %s vs %s: insufficient pairs\n", name.c_str(), t.algorithm_a.c_str(),
                                t.algorithm_b.c_str());
                } else if (t.result->degenerate) {
                    std::printf("  %-24s %s vs %s: identical results\n", name.c_str(), t.algorithm_a.c_str(),
                                t.algorithm_b.c_str());
                } else {
                    std::printf("  %-24s %s vs %s: W+ %.1f W- %.1f W %.1f p %.4g %s\n", name.c_str(),
                                t.algorithm_a.c_str(), t.algorithm_b.c_str(), t.result->positive_sum,
                                t.result->negative_sum, t.result->w, t.result->p_value,
                                t.result->reject ? "rejected" : "not rejected");
                }
            }
        }
        std::printf("\n");
    }
    if (!reference.empty()) std::printf("%s", ex::reference_csv(rep, ex::read_reference(reference)).c_str());
    if (!store.missing.empty()) std::printf("%zu cells missing from the store\n", store.missing.size());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Self-adaptive evolutionary algorithm with tree-encoded operators"};
    app.require_subcommand(1);

    RunOptions ro;
    auto* run = app.add_subcommand("run", "Execute an experiment grid (resumes completed cells)");
    run->add_option("--config", ro.config, "JSON experiment configuration")->check(CLI::ExistingFile);
    run->add_option("--function", ro.functions, "Benchmark id, key or name (repeatable)")->delimiter(',');
    run->add_option("--algorithm", ro.algorithms, "AOEA, HAEA or GA (repeatable)")->delimiter(',');
    run->add_option("--pop-size", ro.pop_sizes, "Population size (repeatable)")->delimiter(',');
    run->add_option("--generations", ro.generations, "Generations per run");
    run->add_option("--kappa", ro.kappa, "Operator pool size (even)");
    run->add_option("--dim", ro.dim, "Dimensionality override (0 keeps defaults)");
    run->add_option("--reps", ro.reps, "Repetitions per cell");
    run->add_option("--seed", ro.seed, "Base seed");
    run->add_option("--out", ro.out, "Output directory");
    run->add_option("--jobs", ro.jobs, "Concurrent runs");
    run->add_option("--variant", ro.variant, "Benchmark variant: repaired or as-printed");
    run->add_option("--snapshot-every", ro.snapshot_every, "Operator snapshot cadence (0 disables)");
    run->add_flag("--force", ro.force, "Recompute completed cells");

    std::string store_dir = "results";
    std::vector<std::string> kinds;
    auto* report = app.add_subcommand("report", "Write reports from a result store");
    report->add_option("--out", store_dir, "Result store directory");
    report->add_option("--kind", kinds, "tables, stats, traces, embeddings or rates (repeatable; default all)")
        ->delimiter(',');

    std::string trees_path, analyze_out = "analysis";
    std::uint64_t analyze_seed = 1;
    auto* analyze = app.add_subcommand("analyze", "Tree distances and 2D embeddings of operator snapshots");
    analyze->add_option("--trees", trees_path, "trees.txt of an AOEA run")->required()->check(CLI::ExistingFile);
    analyze->add_option("--out", analyze_out, "Output directory");
    analyze->add_option("--seed", analyze_seed, "Seed for the embedding layouts");

    std::string reference;
    auto* compare = app.add_subcommand("compare", "Median tables and pairwise Wilcoxon tests");
    compare->add_option("--out", store_dir, "Result store directory");
    compare->add_option("--reference", reference, "CSV of reference medians")->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*run) return cmd_run(ro);
        if (*report) return cmd_report(store_dir, kinds);
        if (*analyze) return cmd_analyze(trees_path, analyze_out, analyze_seed);
        if (*compare) return cmd_compare(store_dir, reference);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
