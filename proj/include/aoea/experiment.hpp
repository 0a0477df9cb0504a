#pragma once

/// @file experiment.hpp
/// @brief Batch experiment runner: configuration, per-cell seeding, the
/// on-disk result store (traces, rates, tree snapshots, summaries, manifest)
/// and the report generators that read it back.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "aoea/analysis.hpp"
#include "aoea/benchmarks.hpp"
#include "aoea/engine.hpp"
#include "aoea/stats.hpp"

namespace aoea::experiment {

namespace fs = std::filesystem;
using json = nlohmann::json;

inline constexpr int kFormatVersion = 1;

struct ExperimentConfig {
    std::vector<int> functions;
    std::vector<Algorithm> algorithms{Algorithm::GA, Algorithm::HAEA, Algorithm::AOEA};
    std::vector<std::size_t> population_sizes{50};
    std::size_t generations = 500;
    std::size_t kappa = 16;
    /// 0 keeps each benchmark's default dimensionality.
    std::size_t dimensionality = 0;
    std::size_t repetitions = 50;
    std::uint64_t seed = 1;
    std::string output = "results";
    /// Operator-tree snapshot cadence for AOEA runs (0 disables).
    std::size_t snapshot_every = 0;
    benchmarks::Variant variant = benchmarks::Variant::Repaired;
    /// Concurrent cells; not part of the configuration identity.
    std::size_t jobs = 1;
    /// Recompute cells that are already complete.
    bool force = false;
};

inline void validate(const ExperimentConfig& c) {
    if (c.functions.empty()) throw std::invalid_argument("experiment: no functions selected");
    for (int id : c.functions) (void)benchmarks::spec(id);
    if (c.algorithms.empty()) throw std::invalid_argument("experiment: no algorithms selected");
    if (c.population_sizes.empty()) throw std::invalid_argument("experiment: no population sizes");
    for (auto p : c.population_sizes) {
        if (p < 2) throw std::invalid_argument("experiment: population size must be at least 2");
    }
    if (c.repetitions < 1) throw std::invalid_argument("experiment: repetitions must be at least 1");
    if (c.generations < 1) throw std::invalid_argument("experiment: generations must be at least 1");
    if (c.kappa < 2 || c.kappa % 2 != 0) throw std::invalid_argument("experiment: kappa must be even and at least 2");
    if (c.jobs < 1) throw std::invalid_argument("experiment: jobs must be at least 1");
}

/// Configuration fields that determine results (excludes output, jobs, force).
inline json identity_json(const ExperimentConfig& c) {
    json algs = json::array();
    for (auto a : c.algorithms) algs.push_back(std::string(algorithm_name(a)));
    return json{{"functions", c.functions},
                {"algorithms", algs},
                {"population_sizes", c.population_sizes},
                {"generations", c.generations},
                {"kappa", c.kappa},
                {"dimensionality", c.dimensionality},
                {"repetitions", c.repetitions},
                {"seed", c.seed},
                {"snapshot_every", c.snapshot_every},
                {"variant", std::string(benchmarks::variant_name(c.variant))}};
}

inline json to_json(const ExperimentConfig& c) {
    json j = identity_json(c);
    j["output"] = c.output;
    j["jobs"] = c.jobs;
    return j;
}

/// Reads a JSON config. Functions may be ids or names; unknown keys are errors.
inline ExperimentConfig config_from_json(const json& j) {
    static const std::set<std::string> known{"functions",  "algorithms",     "population_sizes", "generations",
                                             "kappa",      "dimensionality", "repetitions",      "seed",
                                             "output",     "snapshot_every", "variant",          "jobs"};
    for (const auto& [key, _] : j.items()) {
        if (!known.count(key)) throw std::invalid_argument("config: unknown key '" + key + "'");
    }
    ExperimentConfig c;
    if (j.contains("functions")) {
        for (const auto& f : j.at("functions")) {
            c.functions.push_back(f.is_number_integer() ? benchmarks::spec(f.get<int>()).id
                                                        : benchmarks::resolve(f.get<std::string>()));
        }
    }
    if (j.contains("algorithms")) {
        c.algorithms.clear();
        for (const auto& a : j.at("algorithms")) c.algorithms.push_back(parse_algorithm(a.get<std::string>()));
    }
    if (j.contains("population_sizes")) c.population_sizes = j.at("population_sizes").get<std::vector<std::size_t>>();
    if (j.contains("generations")) c.generations = j.at("generations").get<std::size_t>();
    if (j.contains("kappa")) c.kappa = j.at("kappa").get<std::size_t>();
    if (j.contains("dimensionality")) c.dimensionality = j.at("dimensionality").get<std::size_t>();
    if (j.contains("repetitions")) c.repetitions = j.at("repetitions").get<std::size_t>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("output")) c.output = j.at("output").get<std::string>();
    if (j.contains("snapshot_every")) c.snapshot_every = j.at("snapshot_every").get<std::size_t>();
    if (j.contains("variant")) c.variant = benchmarks::parse_variant(j.at("variant").get<std::string>());
    if (j.contains("jobs")) c.jobs = j.at("jobs").get<std::size_t>();
    return c;
}

inline ExperimentConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path.string());
    return config_from_json(json::parse(in));
}

/// FNV-1a, 64 bit.
inline std::uint64_t fnv1a(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : data) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

/// Formats a double so it parses back to the same value; NaN prints as "nan".
inline std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline double parse_double(const std::string& s) {
    if (s == "nan") return std::nan("");
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    return std::stod(s);
}

// ---------------------------------------------------------------------------
// Cells

inline int algorithm_id(Algorithm a) {
    switch (a) {
        case Algorithm::GA: return 0;
        case Algorithm::HAEA: return 1;
        case Algorithm::AOEA: return 2;
    }
    return -1;
}

struct Cell {
    int function = 0;
    Algorithm algorithm = Algorithm::AOEA;
    std::size_t population = 0;
    std::size_t repetition = 0;

    auto operator<=>(const Cell&) const = default;
};

/// Run seed: mix of (base seed, function, algorithm, population, repetition).
inline std::uint64_t cell_seed(std::uint64_t base, const Cell& c) {
    return derive_seed(base, static_cast<std::uint64_t>(c.function), static_cast<std::uint64_t>(algorithm_id(c.algorithm)),
                       c.population, c.repetition);
}

/// Initial-population seed; independent of the algorithm so all algorithms
/// of a (function, population, repetition) start from the same population.
inline std::uint64_t init_seed(std::uint64_t base, const Cell& c) {
    return derive_seed(base, 0x1417ULL, static_cast<std::uint64_t>(c.function), c.population, c.repetition);
}

inline std::vector<Cell> cells(const ExperimentConfig& c) {
    std::vector<Cell> out;
    for (int f : c.functions)
        for (auto a : c.algorithms)
            for (auto p : c.population_sizes)
                for (std::size_t r = 0; r < c.repetitions; ++r) out.push_back(Cell{f, a, p, r});
    return out;
}

inline std::string cell_name(const Cell& c) {
    return "f" + std::to_string(c.function) + "_" + std::string(algorithm_name(c.algorithm)) + "_p" +
           std::to_string(c.population) + "_r" + std::to_string(c.repetition);
}

inline fs::path cell_dir(const fs::path& root, const Cell& c) { return root / "runs" / cell_name(c); }

/// Identity of a single run: everything that determines its output.
inline std::string cell_hash(const ExperimentConfig& cfg, const Cell& c) {
    json j{{"function", c.function},
           {"algorithm", std::string(algorithm_name(c.algorithm))},
           {"population", c.population},
           {"repetition", c.repetition},
           {"generations", cfg.generations},
           {"kappa", cfg.kappa},
           {"dimensionality", cfg.dimensionality},
           {"seed", cfg.seed},
           {"snapshot_every", cfg.snapshot_every},
           {"variant", std::string(benchmarks::variant_name(cfg.variant))},
           {"format", kFormatVersion}};
    return hex64(fnv1a(j.dump()));
}

inline std::string config_hash(const ExperimentConfig& c) { return hex64(fnv1a(identity_json(c).dump())); }

inline EngineConfig engine_config(const ExperimentConfig& cfg, const Cell& c) {
    EngineConfig e;
    e.algorithm = c.algorithm;
    e.population_size = c.population;
    e.kappa = cfg.kappa;
    e.generations = cfg.generations;
    e.seed = cell_seed(cfg.seed, c);
    e.init_seed = init_seed(cfg.seed, c);
    e.snapshot_every = cfg.snapshot_every;
    return e;
}

// ---------------------------------------------------------------------------
// File formats

inline void write_file_atomic(const fs::path& path, const std::string& content) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    fs::rename(tmp, path);
}

inline std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::string trace_csv(const RunTrace& t) {
    std::string s = "# aoea-trace v" + std::to_string(kFormatVersion) + "\n";
    s += "generation,best_fitness,median_fitness,max_rate,evals\n";
    for (const auto& r : t.records) {
        s += std::to_string(r.generation) + "," + fmt(r.best_fitness) + "," + fmt(r.median_fitness) + "," +
             fmt(r.max_rate) + "," + std::to_string(r.evaluations) + "\n";
    }
    return s;
}

inline std::string rates_csv(const RunTrace& t) {
    std::string s = "# aoea-rates v" + std::to_string(kFormatVersion) + "\n";
    s += "generation";
    const std::size_t k = t.records.empty() ? 0 : t.records.front().rates.size();
    for (std::size_t i = 0; i < k; ++i) s += ",r" + std::to_string(i);
    s += "\n";
    for (const auto& r : t.records) {
        s += std::to_string(r.generation);
        for (double v : r.rates) s += "," + fmt(v);
        s += "\n";
    }
    return s;
}

/// One line per tree: "<generation> <slot> <serialized tree>".
inline std::string trees_text(const RunTrace& t) {
    std::string s = "# aoea-trees v" + std::to_string(kFormatVersion) + "\n";
    for (const auto& r : t.records) {
        for (std::size_t i = 0; i < r.trees.size(); ++i) {
            s += std::to_string(r.generation) + " " + std::to_string(i) + " " + r.trees[i] + "\n";
        }
    }
    return s;
}

inline std::vector<std::vector<std::string>> read_csv(const fs::path& path, const std::string& magic) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) || line.rfind("# " + magic + " v", 0) != 0) {
        throw std::runtime_error(path.string() + ": missing '" + magic + "' header");
    }
    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string f;
        while (std::getline(ss, f, ',')) fields.push_back(f);
        rows.push_back(std::move(fields));
    }
    return rows;
}

struct TraceRow {
    std::size_t generation = 0;
    double best_fitness = 0.0;
    double median_fitness = 0.0;
    double max_rate = 0.0;
    std::size_t evaluations = 0;
};

inline std::vector<TraceRow> read_trace(const fs::path& path) {
    auto rows = read_csv(path, "aoea-trace");
    std::vector<TraceRow> out;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (r.size() != 5) throw std::runtime_error(path.string() + ": malformed trace row");
        out.push_back(TraceRow{std::stoull(r[0]), parse_double(r[1]), parse_double(r[2]), parse_double(r[3]),
                               std::stoull(r[4])});
    }
    return out;
}

/// Snapshots by generation, trees in slot order.
inline std::map<std::size_t, std::vector<std::string>> read_trees(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) || line.rfind("# aoea-trees v", 0) != 0) {
        throw std::runtime_error(path.string() + ": missing 'aoea-trees' header");
    }
    std::map<std::size_t, std::vector<std::string>> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::size_t gen = 0, slot = 0;
        ss >> gen >> slot;
        std::string tree;
        std::getline(ss >> std::ws, tree);
        auto& v = out[gen];
        if (slot != v.size()) throw std::runtime_error(path.string() + ": tree slots out of order");
        v.push_back(tree);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Running

struct RunSummary {
    Cell cell;
    std::uint64_t seed = 0;
    std::uint64_t init_seed = 0;
    std::string cell_hash;
    double best_fitness = 0.0;
    double initial_best = 0.0;
    std::size_t evaluations = 0;
    std::vector<std::string> files;
};

inline json to_json(const RunSummary& s) {
    return json{{"version", kFormatVersion},
                {"function", s.cell.function},
                {"algorithm", std::string(algorithm_name(s.cell.algorithm))},
                {"population", s.cell.population},
                {"repetition", s.cell.repetition},
                {"seed", s.seed},
                {"init_seed", s.init_seed},
                {"cell_hash", s.cell_hash},
                {"best_fitness", fmt(s.best_fitness)},
                {"initial_best", fmt(s.initial_best)},
                {"evaluations", s.evaluations},
                {"files", s.files}};
}

inline RunSummary summary_from_json(const json& j) {
    RunSummary s;
    s.cell = Cell{j.at("function").get<int>(), parse_algorithm(j.at("algorithm").get<std::string>()),
                  j.at("population").get<std::size_t>(), j.at("repetition").get<std::size_t>()};
    s.seed = j.at("seed").get<std::uint64_t>();
    s.init_seed = j.at("init_seed").get<std::uint64_t>();
    s.cell_hash = j.at("cell_hash").get<std::string>();
    s.best_fitness = parse_double(j.at("best_fitness").get<std::string>());
    s.initial_best = parse_double(j.at("initial_best").get<std::string>());
    s.evaluations = j.at("evaluations").get<std::size_t>();
    s.files = j.at("files").get<std::vector<std::string>>();
    return s;
}

/// The summary of a completed cell whose hash matches, if any.
inline std::optional<RunSummary> completed(const ExperimentConfig& cfg, const Cell& c) {
    const fs::path path = cell_dir(cfg.output, c) / "summary.json";
    if (!fs::exists(path)) return std::nullopt;
    try {
        auto s = summary_from_json(json::parse(read_file(path)));
        if (s.cell_hash != cell_hash(cfg, c)) return std::nullopt;
        for (const auto& f : s.files) {
            if (!fs::exists(fs::path(cfg.output) / f)) return std::nullopt;
        }
        return s;
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

inline Problem cell_problem(const ExperimentConfig& cfg, int function) {
    return benchmarks::make_problem(function, cfg.dimensionality, cfg.variant);
}

/// Runs one cell and writes its files; summary.json is written last, so its
/// presence marks the cell complete.
inline RunSummary run_cell(const ExperimentConfig& cfg, const Cell& c) {
    const Problem p = cell_problem(cfg, c.function);
    const EngineConfig e = engine_config(cfg, c);
    const RunTrace trace = run(p, e);
    const fs::path dir = cell_dir(cfg.output, c);
    fs::create_directories(dir);
    const std::string rel = "runs/" + cell_name(c) + "/";

    RunSummary s;
    s.cell = c;
    s.seed = e.seed;
    s.init_seed = *e.init_seed;
    s.cell_hash = cell_hash(cfg, c);
    s.best_fitness = trace.best_fitness;
    s.initial_best = trace.records.front().best_fitness;
    s.evaluations = trace.records.back().evaluations;

    write_file_atomic(dir / "trace.csv", trace_csv(trace));
    s.files.push_back(rel + "trace.csv");
    if (c.algorithm != Algorithm::GA) {
        write_file_atomic(dir / "rates.csv", rates_csv(trace));
        s.files.push_back(rel + "rates.csv");
    }
    if (c.algorithm == Algorithm::AOEA && cfg.snapshot_every > 0) {
        write_file_atomic(dir / "trees.txt", trees_text(trace));
        s.files.push_back(rel + "trees.txt");
    }
    s.files.push_back(rel + "summary.json");
    write_file_atomic(dir / "summary.json", to_json(s).dump(2) + "\n");
    return s;
}

struct RunReport {
    std::size_t executed = 0;
    std::size_t skipped = 0;
    std::vector<RunSummary> summaries;  ///< in cell order
};

inline void write_manifest(const ExperimentConfig& cfg, const std::vector<RunSummary>& summaries) {
    json entries = json::array();
    for (const auto& s : summaries) {
        for (const auto& f : s.files) {
            entries.push_back(json{{"file", f},
                                   {"function", s.cell.function},
                                   {"algorithm", std::string(algorithm_name(s.cell.algorithm))},
                                   {"population", s.cell.population},
                                   {"repetition", s.cell.repetition},
                                   {"seed", s.seed},
                                   {"config_hash", s.cell_hash}});
        }
    }
    json m{{"version", kFormatVersion},
           {"config", identity_json(cfg)},
           {"config_hash", config_hash(cfg)},
           {"entries", entries}};
    write_file_atomic(fs::path(cfg.output) / "manifest.json", m.dump(2) + "\n");
}

/// Executes every missing cell (all cells when `force`) with up to
/// `cfg.jobs` worker threads, then rewrites the manifest.
template <typename Progress>
RunReport run_experiment(const ExperimentConfig& cfg, Progress progress) {
    validate(cfg);
    const fs::path root = cfg.output;
    std::error_code ec;
    fs::create_directories(root / "runs", ec);
    {
        const fs::path probe = root / ".write-probe";
        std::ofstream out(probe);
        if (ec || !out) throw std::runtime_error("output directory " + root.string() + " is not writable");
        out.close();
        fs::remove(probe, ec);
    }

    const auto all = cells(cfg);
    std::vector<std::optional<RunSummary>> results(all.size());
    std::vector<std::size_t> pending;
    for (std::size_t i = 0; i < all.size(); ++i) {
        if (!cfg.force) results[i] = completed(cfg, all[i]);
        if (!results[i]) pending.push_back(i);
    }

    RunReport report;
    report.skipped = all.size() - pending.size();
    std::atomic<std::size_t> next{0};
    std::mutex mu;
    std::exception_ptr failure;
    auto worker = [&] {
        for (;;) {
            {
                std::lock_guard lock(mu);
                if (failure) return;
            }
            const std::size_t k = next.fetch_add(1);
            if (k >= pending.size()) return;
            const std::size_t i = pending[k];
            try {
                auto s = run_cell(cfg, all[i]);
                std::lock_guard lock(mu);
                results[i] = std::move(s);
                ++report.executed;
                progress(all[i], *results[i], report.executed, pending.size());
            } catch (...) {
                std::lock_guard lock(mu);
                if (!failure) failure = std::current_exception();
                return;
            }
        }
    };
    const std::size_t threads = std::min(cfg.jobs, std::max<std::size_t>(pending.size(), 1));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);

    for (auto& r : results) report.summaries.push_back(std::move(*r));
    write_manifest(cfg, report.summaries);
    return report;
}

inline RunReport run_experiment(const ExperimentConfig& cfg) {
    return run_experiment(cfg, [](const Cell&, const RunSummary&, std::size_t, std::size_t) {});
}

// ---------------------------------------------------------------------------
// Reading a store back

struct Store {
    fs::path root;
    ExperimentConfig config;
    std::map<Cell, RunSummary> runs;
    std::vector<Cell> missing;
};

/// Loads the configuration from the manifest and every completed cell.
inline Store open_store(const fs::path& root) {
    const fs::path manifest = root / "manifest.json";
    if (!fs::exists(manifest)) throw std::runtime_error("no manifest.json in " + root.string());
    const json m = json::parse(read_file(manifest));
    Store s;
    s.root = root;
    s.config = config_from_json(m.at("config"));
    s.config.output = root.string();
    for (const auto& c : cells(s.config)) {
        if (auto r = completed(s.config, c)) {
            s.runs.emplace(c, std::move(*r));
        } else {
            s.missing.push_back(c);
        }
    }
    return s;
}

enum class ReportKind { Tables, Stats, Traces, Embeddings, Rates };

inline constexpr std::array<ReportKind, 5> kReportKinds{ReportKind::Tables, ReportKind::Stats, ReportKind::Traces,
                                                        ReportKind::Embeddings, ReportKind::Rates};

inline std::string_view report_kind_name(ReportKind k) {
    switch (k) {
        case ReportKind::Tables: return "tables";
        case ReportKind::Stats: return "stats";
        case ReportKind::Traces: return "traces";
        case ReportKind::Embeddings: return "embeddings";
        case ReportKind::Rates: return "rates";
    }
    return "?";
}

inline ReportKind parse_report_kind(std::string_view s) {
    for (auto k : kReportKinds) {
        if (report_kind_name(k) == s) return k;
    }
    throw std::invalid_argument("unknown report kind '" + std::string(s) + "'");
}

inline std::vector<std::string> algorithm_columns(const ExperimentConfig& c) {
    std::vector<std::string> out;
    for (auto a : kAlgorithms) {
        if (std::find(c.algorithms.begin(), c.algorithms.end(), a) != c.algorithms.end()) {
            out.emplace_back(algorithm_name(a));
        }
    }
    return out;
}

/// Final best fitness per (function, algorithm, population), restricted to
/// repetitions completed by every algorithm of that (function, population).
inline stats::ResultSet result_set(const Store& s) {
    stats::ResultSet out;
    for (int f : s.config.functions) {
        for (auto p : s.config.population_sizes) {
            for (std::size_t r = 0; r < s.config.repetitions; ++r) {
                bool all = true;
                for (auto a : s.config.algorithms) all = all && s.runs.count(Cell{f, a, p, r});
                if (!all) continue;
                for (auto a : s.config.algorithms) {
                    out[stats::CellKey{f, std::string(algorithm_name(a)), p}].push_back(
                        s.runs.at(Cell{f, a, p, r}).best_fitness);
                }
            }
        }
    }
    return out;
}

inline stats::ComparisonReport comparison(const Store& s) {
    return stats::compare_tables(result_set(s), algorithm_columns(s.config),
                                 [](int id) { return benchmarks::spec(id).direction; });
}

inline std::string short_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2E", v);
    return buf;
}

/// Aligned text rendering of the median table, best marked with '*'.
inline std::string render_table(const stats::ComparisonReport& rep, std::size_t population) {
    std::ostringstream os;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-24s", "function");
    os << buf;
    for (const auto& a : rep.algorithms) {
        std::snprintf(buf, sizeof buf, " %24s", a.c_str());
        os << buf;
    }
    os << "\n";
    for (const auto& row : rep.rows) {
        if (row.population != population) continue;
        std::snprintf(buf, sizeof buf, "%-24s", std::string(benchmarks::spec(row.function).name).c_str());
        os << buf;
        for (const auto& a : rep.algorithms) {
            auto it = row.cells.find(a);
            std::string cell = "-";
            if (it != row.cells.end()) {
                cell = (row.best == a ? "*" : "") + short_num(it->second.median) + " +- " + short_num(it->second.stddev);
            }
            std::snprintf(buf, sizeof buf, " %24s", cell.c_str());
            os << buf;
        }
        os << "\n";
    }
    return os.str();
}

inline std::string tables_csv(const stats::ComparisonReport& rep, std::size_t population) {
    std::string s = "function,name";
    for (const auto& a : rep.algorithms) s += "," + a + "_median," + a + "_std," + a + "_n";
    s += ",best\n";
    for (const auto& row : rep.rows) {
        if (row.population != population) continue;
        s += std::to_string(row.function) + "," + std::string(benchmarks::spec(row.function).key);
        for (const auto& a : rep.algorithms) {
            auto it = row.cells.find(a);
            if (it == row.cells.end()) {
                s += ",,,0";
            } else {
                s += "," + fmt(it->second.median) + "," + fmt(it->second.stddev) + "," + std::to_string(it->second.n);
            }
        }
        s += "," + row.best.value_or("") + "\n";
    }
    return s;
}

inline std::string stats_csv(const stats::ComparisonReport& rep, std::size_t population) {
    std::string s = "function,name,algorithm_a,algorithm_b,n_effective,positive_sum,negative_sum,W,p_value,reject,status\n";
    for (const auto& row : rep.rows) {
        if (row.population != population) continue;
        for (const auto& t : row.tests) {
            s += std::to_string(row.function) + "," + std::string(benchmarks::spec(row.function).key) + "," +
                 t.algorithm_a + "," + t.algorithm_b + ",";
            if (!t.result) {
                s += ",,,,,,insufficient\n";
                continue;
            }
            const auto& w = *t.result;
            s += std::to_string(w.n_effective) + "," + fmt(w.positive_sum) + "," + fmt(w.negative_sum) + "," +
                 fmt(w.w) + "," + fmt(w.p_value) + "," + (w.reject ? "1" : "0") + "," +
                 (w.degenerate ? "degenerate" : (w.exact ? "exact" : "normal")) + "\n";
        }
    }
    return s;
}

struct ReportOutput {
    std::vector<fs::path> files;
    std::vector<std::string> gaps;
};

inline std::string gap_line(const Cell& c) { return cell_name(c); }

/// Writes the requested report kinds under `<store>/reports`. Missing cells
/// are listed in reports/gaps.txt and the remaining data is still reported.
inline ReportOutput write_reports(const Store& s, const std::vector<ReportKind>& kinds) {
    const fs::path dir = s.root / "reports";
    fs::create_directories(dir);
    ReportOutput out;
    for (const auto& c : s.missing) out.gaps.push_back(gap_line(c));
    auto emit = [&](const std::string& name, const std::string& content) {
        write_file_atomic(dir / name, content);
        out.files.push_back(dir / name);
    };
    const auto& cfg = s.config;
    auto want = [&](ReportKind k) { return std::find(kinds.begin(), kinds.end(), k) != kinds.end(); };

    if (want(ReportKind::Tables) || want(ReportKind::Stats)) {
        const auto rep = comparison(s);
        for (auto p : cfg.population_sizes) {
            const std::string suffix = "_p" + std::to_string(p);
            if (want(ReportKind::Tables)) {
                emit("tables" + suffix + ".csv", tables_csv(rep, p));
                emit("tables" + suffix + ".txt", render_table(rep, p));
            }
            if (want(ReportKind::Stats)) emit("stats" + suffix + ".csv", stats_csv(rep, p));
        }
    }

    if (want(ReportKind::Traces)) {
        for (int f : cfg.functions) {
            for (auto p : cfg.population_sizes) {
                std::string content = "generation";
                std::vector<std::vector<std::vector<double>>> per_alg;  // [alg][generation][rep]
                const auto cols = algorithm_columns(cfg);
                for (const auto& name : cols) {
                    content += "," + name + "_median_best";
                    std::vector<std::vector<double>> gens(cfg.generations + 1);
                    for (std::size_t r = 0; r < cfg.repetitions; ++r) {
                        auto it = s.runs.find(Cell{f, parse_algorithm(name), p, r});
                        if (it == s.runs.end()) continue;
                        const auto rows = read_trace(s.root / ("runs/" + cell_name(it->first) + "/trace.csv"));
                        for (const auto& row : rows) {
                            if (row.generation < gens.size()) gens[row.generation].push_back(row.best_fitness);
                        }
                    }
                    per_alg.push_back(std::move(gens));
                }
                content += "\n";
                for (std::size_t g = 0; g <= cfg.generations; ++g) {
                    content += std::to_string(g);
                    for (const auto& gens : per_alg) content += "," + (gens[g].empty() ? std::string() : fmt(median(gens[g])));
                    content += "\n";
                }
                emit("traces_f" + std::to_string(f) + "_p" + std::to_string(p) + ".csv", content);
            }
        }
    }

    const bool has_aoea = std::find(cfg.algorithms.begin(), cfg.algorithms.end(), Algorithm::AOEA) != cfg.algorithms.end();
    if (want(ReportKind::Rates) && has_aoea) {
        for (int f : cfg.functions) {
            for (auto p : cfg.population_sizes) {
                std::vector<std::vector<TraceRow>> runs;
                std::string content = "generation";
                for (std::size_t r = 0; r < cfg.repetitions; ++r) {
                    auto it = s.runs.find(Cell{f, Algorithm::AOEA, p, r});
                    if (it == s.runs.end()) continue;
                    runs.push_back(read_trace(s.root / ("runs/" + cell_name(it->first) + "/trace.csv")));
                    content += ",r" + std::to_string(r);
                }
                content += "\n";
                for (std::size_t g = 0; g <= cfg.generations; ++g) {
                    content += std::to_string(g);
                    for (const auto& rows : runs) content += "," + (g < rows.size() ? fmt(rows[g].max_rate) : std::string());
                    content += "\n";
                }
                emit("max_rate_f" + std::to_string(f) + "_p" + std::to_string(p) + ".csv", content);
            }
        }
    }

    if (want(ReportKind::Embeddings) && has_aoea) {
        if (cfg.snapshot_every == 0) {
            out.gaps.push_back("embeddings: no operator snapshots recorded (snapshot_every = 0)");
        } else {
            // First repetition of each (function, population), as one run per figure.
            for (int f : cfg.functions) {
                for (auto p : cfg.population_sizes) {
                    const Cell c{f, Algorithm::AOEA, p, 0};
                    auto it = s.runs.find(c);
                    if (it == s.runs.end()) continue;
                    const auto snaps = read_trees(s.root / ("runs/" + cell_name(c) + "/trees.txt"));
                    std::string emb = "generation,slot,x,y,stress\n";
                    std::string div = "generation,mean_distance\n";
                    for (const auto& [gen, serialized] : snaps) {
                        const auto trees = analysis::parse_snapshot(serialized);
                        if (trees.size() < 2) continue;
                        const auto d = analysis::pairwise_distances(trees);
                        RandomStream rng(derive_seed(it->second.seed, 0xe3bedULL, gen));
                        const auto e = analysis::smacof_embed(d, rng);
                        for (std::size_t i = 0; i < e.points.size(); ++i) {
                            emb += std::to_string(gen) + "," + std::to_string(i) + "," + fmt(e.points[i][0]) + "," +
                                   fmt(e.points[i][1]) + "," + fmt(e.stress) + "\n";
                        }
                        div += std::to_string(gen) + "," + fmt(d.mean_off_diagonal()) + "\n";
                    }
                    const std::string suffix = "_f" + std::to_string(f) + "_p" + std::to_string(p) + ".csv";
                    emit("embedding" + suffix, emb);
                    emit("diversity" + suffix, div);
                }
            }
        }
    }

    std::string gaps;
    for (const auto& g : out.gaps) gaps += g + "\n";
    emit("gaps.txt", gaps);
    return out;
}

// ---------------------------------------------------------------------------
// Reference comparison

struct ReferenceRow {
    int function = 0;
    std::string algorithm;
    std::size_t population = 0;
    double median = 0.0;
};

/// CSV with header "function,algorithm,population,median".
inline std::vector<ReferenceRow> read_reference(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string line;
    std::getline(in, line);
    if (line != "function,algorithm,population,median") {
        throw std::runtime_error(path.string() + ": expected header 'function,algorithm,population,median'");
    }
    std::vector<ReferenceRow> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string f, a, p, m;
        std::getline(ss, f, ',');
        std::getline(ss, a, ',');
        std::getline(ss, p, ',');
        std::getline(ss, m, ',');
        out.push_back(ReferenceRow{benchmarks::resolve(f), std::string(algorithm_name(parse_algorithm(a))),
                                   static_cast<std::size_t>(std::stoull(p)), parse_double(m)});
    }
    return out;
}

/// log10(|ours| / |reference|) per reference row present in the report.
/// Magnitudes are compared, so sign conventions (e.g. a negative minimum
/// printed as a positive value) do not matter.
inline std::string reference_csv(const stats::ComparisonReport& rep, const std::vector<ReferenceRow>& ref) {
    std::string s = "function,algorithm,population,median,reference,log10_ratio\n";
    for (const auto& r : ref) {
        for (const auto& row : rep.rows) {
            if (row.function != r.function || row.population != r.population) continue;
            auto it = row.cells.find(r.algorithm);
            if (it == row.cells.end()) continue;
            const double ratio = std::log10(std::abs(it->second.median) / std::abs(r.median));
            s += std::to_string(r.function) + "," + r.algorithm + "," + std::to_string(r.population) + "," +
                 fmt(it->second.median) + "," + fmt(r.median) + "," + fmt(ratio) + "\n";
        }
    }
    return s;
}

}  // namespace aoea::experiment
