#pragma once

/// @file stats.hpp
/// @brief Paired Wilcoxon signed-rank test and the result-table comparison
/// built on it (median/spread tables plus pairwise tests).

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "aoea/core.hpp"

namespace aoea::stats {

inline constexpr double kAlpha = 0.05;
inline constexpr std::size_t kMinEffectivePairs = 5;
/// Largest n_effective for which the exact null distribution is used.
inline constexpr std::size_t kExactLimit = 25;

struct WilcoxonResult {
    double positive_sum = 0.0;
    double negative_sum = 0.0;
    double w = 0.0;  ///< min(positive_sum, negative_sum)
    std::size_t n_effective = 0;
    double p_value = 1.0;
    bool reject = false;
    /// Every difference was zero; no decision is possible.
    bool degenerate = false;
    bool exact = false;
};

/// Average ranks (1-based) of `values`; tied values share the mean rank.
inline std::vector<double> average_ranks(std::span<const double> values) {
    std::vector<std::size_t> idx(values.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(values.size());
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j + 1 < idx.size() && values[idx[j + 1]] == values[idx[i]]) ++j;
        const double r = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
        i = j + 1;
    }
    return ranks;
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

/// P(T+ <= w) under the null, where T+ is the sum of a uniformly random
/// subset of `ranks`. Ranks may be half-integers (ties), so the count runs
/// over doubled ranks.
inline double exact_lower_tail(std::span<const double> ranks, double w) {
    std::vector<std::size_t> doubled;
    std::size_t total = 0;
    for (double r : ranks) {
        doubled.push_back(static_cast<std::size_t>(std::llround(2.0 * r)));
        total += doubled.back();
    }
    std::vector<double> count(total + 1, 0.0);
    count[0] = 1.0;
    std::size_t reach = 0;
    for (std::size_t d : doubled) {
        for (std::size_t s = reach + 1; s-- > 0;) {
            if (count[s] != 0.0) count[s + d] += count[s];
        }
        reach += d;
    }
    const auto limit = static_cast<std::size_t>(std::llround(2.0 * w));
    double below = 0.0;
    for (std::size_t s = 0; s <= std::min(limit, total); ++s) below += count[s];
    return below / std::ldexp(1.0, static_cast<int>(ranks.size()));
}

/// Two-sided paired signed-rank test on a - b. Zero differences are dropped.
inline WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("wilcoxon: samples must be paired (equal length)");
    std::vector<double> diffs;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        if (std::isnan(d)) throw std::domain_error("wilcoxon: NaN difference");
        if (d != 0.0) diffs.push_back(d);
    }
    WilcoxonResult r;
    r.n_effective = diffs.size();
    if (diffs.empty()) {
        r.degenerate = true;
        return r;
    }
    if (diffs.size() < kMinEffectivePairs) {
        throw std::invalid_argument("wilcoxon: fewer than 5 nonzero differences");
    }
    std::vector<double> magnitudes;
    for (double d : diffs) magnitudes.push_back(std::abs(d));
    const auto ranks = average_ranks(magnitudes);
    for (std::size_t i = 0; i < diffs.size(); ++i) (diffs[i] > 0 ? r.positive_sum : r.negative_sum) += ranks[i];
    r.w = std::min(r.positive_sum, r.negative_sum);

    const double n = static_cast<double>(r.n_effective);
    if (r.n_effective <= kExactLimit) {
        r.exact = true;
        r.p_value = std::min(1.0, 2.0 * exact_lower_tail(ranks, r.w));
    } else {
        double tie_term = 0.0;
        std::vector<double> sorted = ranks;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t i = 0; i < sorted.size();) {
            std::size_t j = i;
            while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
            const double t = static_cast<double>(j - i);
            tie_term += t * t * t - t;
            i = j;
        }
        const double mean = n * (n + 1.0) / 4.0;
        const double var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term / 48.0;
        const double z = var > 0.0 ? (r.w - mean) / std::sqrt(var) : 0.0;
        r.p_value = std::min(1.0, 2.0 * normal_cdf(z));
    }
    r.reject = r.p_value < kAlpha;
    return r;
}

/// Final best-fitness values paired by repetition index.
struct PairedSample {
    std::vector<double> a;
    std::vector<double> b;

    PairedSample(std::vector<double> first, std::vector<double> second) : a(std::move(first)), b(std::move(second)) {
        if (a.size() != b.size()) throw std::invalid_argument("paired sample: lengths differ");
        if (a.size() < kMinEffectivePairs) throw std::invalid_argument("paired sample: fewer than 5 pairs");
    }
};

inline WilcoxonResult wilcoxon_signed_rank(const PairedSample& s) { return wilcoxon_signed_rank(s.a, s.b); }

inline double sample_stddev(std::span<const double> v) {
    if (v.size() < 2) return 0.0;
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

// ---------------------------------------------------------------------------
// Table comparison

struct CellKey {
    int function = 0;
    std::string algorithm;
    std::size_t population = 0;

    auto operator<=>(const CellKey&) const = default;
};

/// Final best fitness per repetition, indexed by repetition number.
using ResultSet = std::map<CellKey, std::vector<double>>;

struct CellSummary {
    double median = 0.0;
    double stddev = 0.0;
    std::size_t n = 0;
};

struct PairTest {
    std::string algorithm_a;
    std::string algorithm_b;
    /// Empty when fewer than 5 nonzero differences remain.
    std::optional<WilcoxonResult> result;
};

struct TableRow {
    int function = 0;
    std::size_t population = 0;
    std::map<std::string, CellSummary> cells;
    /// Unique best median under the function's direction; empty on ties.
    std::optional<std::string> best;
    std::vector<PairTest> tests;
};

struct ComparisonReport {
    std::vector<std::string> algorithms;  ///< column order
    std::vector<TableRow> rows;
};

/// `direction_of(function)` supplies the optimization direction per
/// function id. `algorithm_order` fixes column and pair order; algorithms
/// absent from the results are skipped.
template <typename DirectionOf>
ComparisonReport compare_tables(const ResultSet& results, const std::vector<std::string>& algorithm_order,
                                DirectionOf direction_of) {
    ComparisonReport report;
    std::map<std::pair<int, std::size_t>, std::vector<std::string>> groups;
    for (const auto& [key, values] : results) groups[{key.function, key.population}].push_back(key.algorithm);
    for (const auto& name : algorithm_order) {
        for (const auto& [key, _] : results) {
            if (key.algorithm == name) {
                report.algorithms.push_back(name);
                break;
            }
        }
    }

    for (const auto& [group, present] : groups) {
        const auto [function, population] = group;
        TableRow row;
        row.function = function;
        row.population = population;
        std::vector<std::string> algs;
        for (const auto& name : report.algorithms) {
            if (std::find(present.begin(), present.end(), name) != present.end()) algs.push_back(name);
        }
        std::optional<std::size_t> reps;
        for (const auto& name : algs) {
            const auto& v = results.at(CellKey{function, name, population});
            if (v.empty()) throw std::invalid_argument("empty result cell");
            if (reps && *reps != v.size()) {
                throw std::invalid_argument("mismatched repetition counts for function " + std::to_string(function) +
                                            ", population " + std::to_string(population));
            }
            reps = v.size();
            row.cells[name] = CellSummary{median(v), sample_stddev(v), v.size()};
        }
        const Direction d = direction_of(function);
        for (const auto& name : algs) {
            const double m = row.cells[name].median;
            bool unique_best = true;
            for (const auto& other : algs) {
                if (other != name && !better(m, row.cells[other].median, d)) {
                    unique_best = false;
                    break;
                }
            }
            if (unique_best) row.best = name;
        }
        for (std::size_t i = 0; i < algs.size(); ++i) {
            for (std::size_t j = i + 1; j < algs.size(); ++j) {
                // Later columns (AOEA last) are listed first, as in "AOEA vs GA".
                const auto& a = algs[j];
                const auto& b = algs[i];
                PairTest test{a, b, std::nullopt};
                const auto& va = results.at(CellKey{function, a, population});
                const auto& vb = results.at(CellKey{function, b, population});
                try {
                    test.result = wilcoxon_signed_rank(va, vb);
                } catch (const std::invalid_argument&) {
                    // Too few nonzero differences for a decision.
                }
                row.tests.push_back(std::move(test));
            }
        }
        report.rows.push_back(std::move(row));
    }
    return report;
}

}  // namespace aoea::stats
