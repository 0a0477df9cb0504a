#pragma once

// Independent reference implementations used as test oracles.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "aoea/analysis.hpp"
#include "aoea/optree.hpp"

namespace oracle {

/// Upper tail of the chi-square distribution, via the regularized lower
/// incomplete gamma series.
inline double chi_square_sf(double x, double dof) {
    if (x <= 0.0) return 1.0;
    const double a = dof / 2.0, z = x / 2.0;
    double term = 1.0 / a, sum = term;
    for (int n = 1; n < 10000; ++n) {
        term *= z / (a + n);
        sum += term;
        if (term < sum * 1e-16) break;
    }
    const double lower = std::exp(a * std::log(z) - z - std::lgamma(a)) * sum;
    return std::max(0.0, 1.0 - lower);
}

inline double chi_square_stat(const std::vector<long>& counts, double expected_each) {
    double chi = 0.0;
    for (long c : counts) chi += (c - expected_each) * (c - expected_each) / expected_each;
    return chi;
}

// ---------------------------------------------------------------------------
// Tree edit distance by exhaustive mapping search.

struct Shape {
    std::vector<std::vector<std::size_t>> children;  // pre-order node ids
};

/// All ordered tree shapes with exactly n nodes, nodes numbered in pre-order.
inline std::vector<Shape> shapes(std::size_t n) {
    // A forest of k nodes is a first tree (1 + a nodes) followed by a forest.
    std::function<std::vector<std::vector<Shape>>(std::size_t)> forests;
    std::function<std::vector<Shape>(std::size_t)> trees;
    trees = [&](std::size_t k) {
        std::vector<Shape> out;
        for (const auto& forest : forests(k - 1)) {
            Shape s;
            s.children.resize(1);
            std::size_t offset = 1;
            for (const auto& t : forest) {
                s.children[0].push_back(offset);
                for (const auto& ch : t.children) {
                    std::vector<std::size_t> shifted;
                    for (auto c : ch) shifted.push_back(c + offset);
                    s.children.push_back(shifted);
                }
                offset += t.children.size();
            }
            out.push_back(s);
        }
        return out;
    };
    forests = [&](std::size_t k) {
        std::vector<std::vector<Shape>> out;
        if (k == 0) {
            out.push_back({});
            return out;
        }
        for (std::size_t first = 1; first <= k; ++first) {
            for (const auto& t : trees(first)) {
                for (auto rest : forests(k - first)) {
                    rest.insert(rest.begin(), t);
                    out.push_back(rest);
                }
            }
        }
        return out;
    };
    return trees(n);
}

struct Relations {
    std::vector<std::vector<bool>> ancestor;  // ancestor[i][j]: i is a proper ancestor of j
};

inline Relations relations(const aoea::analysis::LabeledTree& t) {
    const std::size_t n = t.size();
    Relations r;
    r.ancestor.assign(n, std::vector<bool>(n, false));
    std::function<void(std::size_t, std::vector<std::size_t>&)> walk = [&](std::size_t v, std::vector<std::size_t>& path) {
        for (auto a : path) r.ancestor[a][v] = true;
        path.push_back(v);
        for (auto c : t.children[v]) walk(c, path);
        path.pop_back();
    };
    std::vector<std::size_t> path;
    walk(0, path);
    return r;
}

/// Minimum cost over all valid edit mappings: relabelled pairs plus
/// unmapped nodes of either tree. Nodes are in pre-order, so for
/// non-ancestral pairs "i before j" is the sibling-order relation.
inline std::size_t brute_force_distance(const aoea::analysis::LabeledTree& a, const aoea::analysis::LabeledTree& b) {
    const auto ra = relations(a), rb = relations(b);
    const std::size_t n = a.size(), m = b.size();
    std::vector<std::pair<std::size_t, std::size_t>> mapping;
    std::vector<bool> used(m, false);
    std::size_t best = n + m;
    std::function<void(std::size_t, std::size_t)> search = [&](std::size_t i, std::size_t relabels) {
        if (i == n) {
            best = std::min(best, relabels + (n - mapping.size()) + (m - mapping.size()));
            return;
        }
        search(i + 1, relabels);  // i unmapped
        for (std::size_t j = 0; j < m; ++j) {
            if (used[j]) continue;
            bool ok = true;
            for (const auto& [i2, j2] : mapping) {
                // i2 < i in pre-order; i2 ancestor of i, or i2 entirely left of i.
                const bool anc_a = ra.ancestor[i2][i];
                const bool anc_b = rb.ancestor[j2][j];
                const bool left_b = j2 < j && !anc_b;
                if (anc_a != anc_b || (!anc_a && !left_b) || rb.ancestor[j][j2]) {
                    ok = false;
                    break;
                }
            }
            if (!ok) continue;
            used[j] = true;
            mapping.emplace_back(i, j);
            search(i + 1, relabels + (a.labels[i] == b.labels[j] ? 0 : 1));
            mapping.pop_back();
            used[j] = false;
        }
    };
    search(0, 0);
    return best;
}

/// Every restricted growth string of length n with at most `max_blocks`
/// blocks: all label-equality patterns over n positions.
inline void for_each_partition(std::size_t n, std::size_t max_blocks,
                               const std::function<void(const std::vector<int>&)>& f) {
    std::vector<int> rgs(n, 0);
    std::function<void(std::size_t, int)> rec = [&](std::size_t pos, int blocks) {
        if (pos == n) {
            f(rgs);
            return;
        }
        for (int v = 0; v <= blocks && v < static_cast<int>(max_blocks); ++v) {
            rgs[pos] = v;
            rec(pos + 1, std::max(blocks, v + 1));
        }
    };
    if (n == 0) {
        f(rgs);
        return;
    }
    rec(0, 0);
}

/// All valid operator trees with at most `max_nodes` nodes.
inline std::vector<aoea::OperatorTree> all_operator_trees(std::size_t max_nodes) {
    using aoea::AtomicOp;
    // trees[k]: every valid pre-order sequence with exactly k nodes.
    std::vector<std::vector<std::vector<AtomicOp>>> trees(max_nodes + 1);
    for (std::size_t k = 1; k <= max_nodes; ++k) {
        if (k == 1) {
            trees[1] = {{AtomicOp::NullFirst}, {AtomicOp::NullSecond}};
            continue;
        }
        for (AtomicOp op : aoea::kUnaryOps) {
            for (const auto& c : trees[k - 1]) {
                std::vector<AtomicOp> t{op};
                t.insert(t.end(), c.begin(), c.end());
                trees[k].push_back(t);
            }
        }
        for (AtomicOp op : aoea::kBinaryOps) {
            for (std::size_t l = 1; l + 1 < k; ++l) {
                for (const auto& lt : trees[l]) {
                    for (const auto& rt : trees[k - 1 - l]) {
                        std::vector<AtomicOp> t{op};
                        t.insert(t.end(), lt.begin(), lt.end());
                        t.insert(t.end(), rt.begin(), rt.end());
                        trees[k].push_back(t);
                    }
                }
            }
        }
    }
    std::vector<aoea::OperatorTree> out;
    for (const auto& level : trees)
        for (const auto& t : level) out.emplace_back(t);
    return out;
}

// ---------------------------------------------------------------------------
// Wilcoxon by sign enumeration.

/// Two-sided p-value: the fraction of the 2^n sign assignments whose
/// min(T+, T-) is at most the observed statistic.
inline double wilcoxon_enumerated_p(const std::vector<double>& ranks, double w_observed) {
    const std::size_t n = ranks.size();
    double total = 0.0;
    for (double r : ranks) total += r;
    std::uint64_t hits = 0;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
        double plus = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (mask >> i & 1U) plus += ranks[i];
        }
        if (std::min(plus, total - plus) <= w_observed + 1e-9) ++hits;
    }
    return static_cast<double>(hits) / std::ldexp(1.0, static_cast<int>(n));
}

}  // namespace oracle
