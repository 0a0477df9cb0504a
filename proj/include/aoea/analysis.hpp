#pragma once

/// @file analysis.hpp
/// @brief Operator-population analytics: Zhang-Shasha tree edit distance,
/// pairwise distance matrices, SMACOF 2D embeddings and rate trajectories.

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "aoea/core.hpp"
#include "aoea/engine.hpp"
#include "aoea/optree.hpp"

namespace aoea::analysis {

/// Generic ordered, labelled tree. Nodes are indexed in pre-order; node 0 is
/// the root.
struct LabeledTree {
    std::vector<int> labels;
    std::vector<std::vector<std::size_t>> children;

    std::size_t size() const { return labels.size(); }
};

inline LabeledTree to_labeled(const OperatorTree& t) {
    LabeledTree out;
    out.labels.reserve(t.size());
    out.children.resize(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        out.labels.push_back(static_cast<int>(t.label(i)));
        out.children[i] = t.children(i);
    }
    return out;
}

namespace detail {

/// Post-order view: 1-based labels and leftmost-leaf indices plus keyroots.
struct PostorderForm {
    std::vector<int> label;     // [1..n]
    std::vector<std::size_t> lml;  // leftmost leaf descendant, [1..n]
    std::vector<std::size_t> keyroots;
};

inline PostorderForm postorder_form(const LabeledTree& t) {
    PostorderForm f;
    const std::size_t n = t.size();
    f.label.assign(n + 1, 0);
    f.lml.assign(n + 1, 0);
    std::size_t counter = 0;
    // Iterative post-order walk returning each node's post-order number.
    struct Frame {
        std::size_t node;
        std::size_t next_child;
        std::size_t leftmost;
    };
    std::vector<Frame> stack{{0, 0, 0}};
    while (!stack.empty()) {
        Frame& fr = stack.back();
        const auto& kids = t.children[fr.node];
        if (fr.next_child < kids.size()) {
            stack.push_back({kids[fr.next_child++], 0, 0});
            continue;
        }
        const std::size_t post = ++counter;
        f.label[post] = t.labels[fr.node];
        f.lml[post] = fr.leftmost == 0 ? post : fr.leftmost;
        const std::size_t lm = f.lml[post];
        stack.pop_back();
        if (!stack.empty() && stack.back().leftmost == 0) stack.back().leftmost = lm;
    }
    // A keyroot is the highest node sharing its leftmost leaf.
    for (std::size_t i = 1; i <= n; ++i) {
        bool highest = true;
        for (std::size_t j = i + 1; j <= n; ++j) {
            if (f.lml[j] == f.lml[i]) {
                highest = false;
                break;
            }
        }
        if (highest) f.keyroots.push_back(i);
    }
    return f;
}

}  // namespace detail

/// Ordered tree edit distance with unit insert, delete and relabel costs.
inline std::size_t tree_edit_distance(const LabeledTree& a, const LabeledTree& b) {
    const auto fa = detail::postorder_form(a);
    const auto fb = detail::postorder_form(b);
    const std::size_t n = a.size(), m = b.size();
    std::vector<std::vector<std::size_t>> td(n + 1, std::vector<std::size_t>(m + 1, 0));
    std::vector<std::vector<std::size_t>> fd(n + 1, std::vector<std::size_t>(m + 1, 0));

    for (std::size_t i : fa.keyroots) {
        for (std::size_t j : fb.keyroots) {
            const std::size_t li = fa.lml[i], lj = fb.lml[j];
            fd[li - 1][lj - 1] = 0;
            for (std::size_t i1 = li; i1 <= i; ++i1) fd[i1][lj - 1] = fd[i1 - 1][lj - 1] + 1;
            for (std::size_t j1 = lj; j1 <= j; ++j1) fd[li - 1][j1] = fd[li - 1][j1 - 1] + 1;
            for (std::size_t i1 = li; i1 <= i; ++i1) {
                for (std::size_t j1 = lj; j1 <= j; ++j1) {
                    const std::size_t del = fd[i1 - 1][j1] + 1;
                    const std::size_t ins = fd[i1][j1 - 1] + 1;
                    if (fa.lml[i1] == li && fb.lml[j1] == lj) {
                        const std::size_t rel = fd[i1 - 1][j1 - 1] + (fa.label[i1] == fb.label[j1] ? 0 : 1);
                        fd[i1][j1] = std::min({del, ins, rel});
                        td[i1][j1] = fd[i1][j1];
                    } else {
                        const std::size_t sub = fd[fa.lml[i1] - 1][fb.lml[j1] - 1] + td[i1][j1];
                        fd[i1][j1] = std::min({del, ins, sub});
                    }
                }
            }
        }
    }
    return td[n][m];
}

inline std::size_t tree_edit_distance(const OperatorTree& a, const OperatorTree& b) {
    return tree_edit_distance(to_labeled(a), to_labeled(b));
}

enum class Normalization { None, SizeSum };

/// Symmetric n x n matrix, row-major.
class DistanceMatrix {
public:
    explicit DistanceMatrix(std::size_t n = 0) : n_(n), values_(n * n, 0.0) {}

    std::size_t size() const { return n_; }
    double operator()(std::size_t i, std::size_t j) const { return values_[i * n_ + j]; }
    void set(std::size_t i, std::size_t j, double v) {
        values_[i * n_ + j] = v;
        values_[j * n_ + i] = v;
    }

    /// Mean over the off-diagonal entries.
    double mean_off_diagonal() const {
        if (n_ < 2) return 0.0;
        double s = 0.0;
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = i + 1; j < n_; ++j) s += (*this)(i, j);
        return s / (static_cast<double>(n_ * (n_ - 1)) / 2.0);
    }

private:
    std::size_t n_;
    std::vector<double> values_;
};

inline DistanceMatrix pairwise_distances(std::span<const OperatorTree> trees,
                                         Normalization norm = Normalization::SizeSum) {
    if (trees.size() < 2) throw std::invalid_argument("pairwise_distances needs at least two trees");
    std::vector<LabeledTree> labeled;
    labeled.reserve(trees.size());
    for (const auto& t : trees) labeled.push_back(to_labeled(t));
    DistanceMatrix d(trees.size());
    for (std::size_t i = 0; i < trees.size(); ++i) {
        for (std::size_t j = i + 1; j < trees.size(); ++j) {
            double v = static_cast<double>(tree_edit_distance(labeled[i], labeled[j]));
            if (norm == Normalization::SizeSum) v /= static_cast<double>(trees[i].size() + trees[j].size());
            d.set(i, j, v);
        }
    }
    return d;
}

struct Embedding2D {
    std::vector<std::array<double, 2>> points;
    double stress = 0.0;
    std::vector<double> stress_history;  ///< raw stress after each iteration, starting with the initial layout
    std::size_t iterations = 0;
};

inline double raw_stress(const DistanceMatrix& d, const std::vector<std::array<double, 2>>& x) {
    double s = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        for (std::size_t j = i + 1; j < d.size(); ++j) {
            const double e = std::hypot(x[i][0] - x[j][0], x[i][1] - x[j][1]);
            s += (d(i, j) - e) * (d(i, j) - e);
        }
    }
    return s;
}

/// SMACOF stress majorization with unit weights (Guttman transform),
/// started from a uniform random layout in [-1, 1]^2.
inline Embedding2D smacof_embed(const DistanceMatrix& d, RandomStream& rng, std::size_t max_iters = 300,
                                double tol = 1e-6) {
    const std::size_t n = d.size();
    Embedding2D out;
    out.points.assign(n, {0.0, 0.0});
    bool all_zero = true;
    for (std::size_t i = 0; i < n && all_zero; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (d(i, j) != 0.0) {
                all_zero = false;
                break;
            }
    if (n == 0 || all_zero) {
        out.stress_history.push_back(0.0);
        return out;
    }

    for (auto& p : out.points) p = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    double stress = raw_stress(d, out.points);
    out.stress_history.push_back(stress);
    std::vector<std::array<double, 2>> next(n);
    for (std::size_t it = 0; it < max_iters; ++it) {
        for (std::size_t i = 0; i < n; ++i) {
            std::array<double, 2> acc{0.0, 0.0};
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                const double dx = out.points[i][0] - out.points[j][0];
                const double dy = out.points[i][1] - out.points[j][1];
                const double e = std::hypot(dx, dy);
                const double ratio = e > 0.0 ? d(i, j) / e : 0.0;
                // B(X) X row i: sum_j ratio * (x_i - x_j)
                acc[0] += ratio * dx;
                acc[1] += ratio * dy;
            }
            next[i] = {acc[0] / static_cast<double>(n), acc[1] / static_cast<double>(n)};
        }
        // The Guttman update is centred; re-add the centroid of the current layout.
        std::array<double, 2> centroid{0.0, 0.0};
        for (const auto& p : out.points) {
            centroid[0] += p[0] / static_cast<double>(n);
            centroid[1] += p[1] / static_cast<double>(n);
        }
        for (auto& p : next) {
            p[0] += centroid[0];
            p[1] += centroid[1];
        }
        out.points.swap(next);
        const double updated = raw_stress(d, out.points);
        out.stress_history.push_back(updated);
        out.iterations = it + 1;
        const bool converged = stress <= 0.0 || (stress - updated) / stress < tol;
        stress = updated;
        if (converged) break;
    }
    out.stress = stress;
    return out;
}

struct RateTrajectories {
    std::vector<double> max_rate;            ///< one entry per record
    std::vector<std::vector<double>> rates;  ///< [generation][operator]
};

inline RateTrajectories rate_trajectories(const RunTrace& trace) {
    RateTrajectories out;
    for (const auto& r : trace.records) {
        if (r.rates.empty()) throw std::invalid_argument("trace has no operator rate records");
        out.max_rate.push_back(*std::max_element(r.rates.begin(), r.rates.end()));
        out.rates.push_back(r.rates);
    }
    return out;
}

/// Trees of one snapshot, parsed.
inline std::vector<OperatorTree> parse_snapshot(const std::vector<std::string>& serialized) {
    std::vector<OperatorTree> trees;
    trees.reserve(serialized.size());
    for (const auto& s : serialized) trees.push_back(parse_tree(s));
    return trees;
}

}  // namespace aoea::analysis
