#pragma once

/// @file optree.hpp
/// @brief Evolvable operators: binary trees of atomic operators.
///
/// A tree is stored as its pre-order label sequence. Because every label
/// fixes its child count (null leaves 0, unary 1, binary 2), the sequence
/// alone determines the shape, each subtree is a contiguous slice, and
/// copying a tree is a single vector copy.
///
/// Evaluation of node O on arguments (A, B):
///   binary  O(A,B) = o(O_left(A,B), O_right(A,B))
///   unary   O(A,B) = o(O_child(A,B))       (the child sits in the right slot)
///   leaf    O(A,B) = A or B                (null operators)
/// Children are evaluated left first, and every leaf sees the root's (A, B).

#include <cctype>
#include <cstdint>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "aoea/atomic_ops.hpp"
#include "aoea/core.hpp"

namespace aoea {

inline constexpr std::size_t kDefaultMaxNodes = 256;
inline constexpr int kDefaultInitDepth = 4;
inline constexpr int kRecombineAttempts = 16;

/// Child count of a node holding `op`.
constexpr int child_count(AtomicOp op) { return is_null(op) ? 0 : arity(op); }

class OperatorTree {
public:
    /// A single Null-First leaf.
    OperatorTree() : nodes_{AtomicOp::NullFirst} {}

    explicit OperatorTree(std::vector<AtomicOp> preorder) : nodes_(std::move(preorder)) {
        if (const auto err = structural_error(nodes_)) throw std::invalid_argument("malformed operator tree: " + *err);
    }

    static OperatorTree leaf(AtomicOp op) { return OperatorTree({op}); }
    static OperatorTree unary(AtomicOp op, const OperatorTree& child) {
        std::vector<AtomicOp> n{op};
        n.insert(n.end(), child.nodes_.begin(), child.nodes_.end());
        return OperatorTree(std::move(n));
    }
    static OperatorTree binary(AtomicOp op, const OperatorTree& left, const OperatorTree& right) {
        std::vector<AtomicOp> n{op};
        n.insert(n.end(), left.nodes_.begin(), left.nodes_.end());
        n.insert(n.end(), right.nodes_.begin(), right.nodes_.end());
        return OperatorTree(std::move(n));
    }

    std::span<const AtomicOp> preorder() const { return nodes_; }
    std::size_t size() const { return nodes_.size(); }
    AtomicOp label(std::size_t node) const { return nodes_.at(node); }

    /// One past the last pre-order index of the subtree rooted at `node`.
    std::size_t subtree_end(std::size_t node) const {
        int pending = 1;
        std::size_t i = node;
        while (pending > 0) {
            pending += child_count(nodes_.at(i)) - 1;
            ++i;
        }
        return i;
    }

    std::size_t subtree_size(std::size_t node) const { return subtree_end(node) - node; }

    /// Pre-order indices of the children of `node` (0, 1 or 2 entries).
    std::vector<std::size_t> children(std::size_t node) const {
        std::vector<std::size_t> out;
        const int k = child_count(nodes_.at(node));
        std::size_t next = node + 1;
        for (int c = 0; c < k; ++c) {
            out.push_back(next);
            next = subtree_end(next);
        }
        return out;
    }

    /// Height in nodes; a single leaf has depth 1.
    int depth() const {
        int max_depth = 0;
        std::vector<int> stack;  // remaining children per open ancestor
        for (AtomicOp op : nodes_) {
            const int d = static_cast<int>(stack.size()) + 1;
            max_depth = std::max(max_depth, d);
            if (!stack.empty()) --stack.back();
            const int k = child_count(op);
            if (k > 0) {
                stack.push_back(k);
            } else {
                while (!stack.empty() && stack.back() == 0) stack.pop_back();
            }
        }
        return max_depth;
    }

    OperatorTree with_label(std::size_t node, AtomicOp op) const {
        if (child_count(op) != child_count(nodes_.at(node))) {
            throw std::invalid_argument("relabel must preserve the node's child count");
        }
        OperatorTree t = *this;
        t.nodes_[node] = op;
        return t;
    }

    /// Copy with the subtree at `node` replaced by `replacement`.
    OperatorTree with_subtree(std::size_t node, std::span<const AtomicOp> replacement) const {
        const std::size_t end = subtree_end(node);
        std::vector<AtomicOp> n;
        n.reserve(nodes_.size() - (end - node) + replacement.size());
        n.insert(n.end(), nodes_.begin(), nodes_.begin() + static_cast<std::ptrdiff_t>(node));
        n.insert(n.end(), replacement.begin(), replacement.end());
        n.insert(n.end(), nodes_.begin() + static_cast<std::ptrdiff_t>(end), nodes_.end());
        return OperatorTree(std::move(n));
    }

    std::span<const AtomicOp> subtree(std::size_t node) const {
        return std::span<const AtomicOp>(nodes_).subspan(node, subtree_size(node));
    }

    bool operator==(const OperatorTree&) const = default;

    /// Returns a description of the first invariant violation, if any.
    static std::optional<std::string> structural_error(std::span<const AtomicOp> nodes) {
        if (nodes.empty()) return "empty tree";
        int pending = 1;
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            if (static_cast<std::size_t>(nodes[i]) >= kAtomicOpCount) return "unknown label at node " + std::to_string(i);
            if (pending == 0) return "trailing nodes after a complete tree";
            pending += child_count(nodes[i]) - 1;
        }
        if (pending != 0) return "missing children";
        return std::nullopt;
    }

private:
    std::vector<AtomicOp> nodes_;
};

inline std::size_t tree_size(const OperatorTree& t) { return t.size(); }
inline int tree_depth(const OperatorTree& t) { return t.depth(); }

namespace detail {

struct EvalResult {
    const RealGenome* ref = nullptr;
    RealGenome owned;

    RealGenome take() && { return ref ? *ref : std::move(owned); }
    const RealGenome& view() const { return ref ? *ref : owned; }
};

inline EvalResult eval_node(const OperatorTree& t, std::size_t& cursor, const RealGenome& a, const RealGenome& b,
                            const Problem& p, RandomStream& rng) {
    const AtomicOp op = t.label(cursor++);
    switch (child_count(op)) {
        case 0:
            return EvalResult{op == AtomicOp::NullFirst ? &a : &b, {}};
        case 1: {
            EvalResult child = eval_node(t, cursor, a, b, p, rng);
            return EvalResult{nullptr, apply_atomic(op, std::move(child).take(), nullptr, p, rng)};
        }
        default: {
            EvalResult left = eval_node(t, cursor, a, b, p, rng);
            EvalResult right = eval_node(t, cursor, a, b, p, rng);
            return EvalResult{nullptr, apply_atomic(op, std::move(left).take(), &right.view(), p, rng)};
        }
    }
}

}  // namespace detail

inline RealGenome evaluate_tree(const OperatorTree& t, const RealGenome& a, const RealGenome& b, const Problem& p,
                                RandomStream& rng) {
    if (a.size() != b.size()) throw std::invalid_argument("evaluate_tree: dimensionality mismatch");
    std::size_t cursor = 0;
    RealGenome out = detail::eval_node(t, cursor, a, b, p, rng).take();
    return out;
}

namespace detail {

inline void grow(std::vector<AtomicOp>& out, int depth, int max_depth, RandomStream& rng) {
    if (depth >= max_depth) {
        out.push_back(rng.coin() ? AtomicOp::NullSecond : AtomicOp::NullFirst);
        return;
    }
    const AtomicOp op = atomic_from_id(static_cast<int>(rng.below(kAtomicOpCount)));
    if (is_null(op)) {
        out.push_back(rng.coin() ? AtomicOp::NullSecond : AtomicOp::NullFirst);
        return;
    }
    out.push_back(op);
    for (int c = 0; c < child_count(op); ++c) grow(out, depth + 1, max_depth, rng);
}

}  // namespace detail

/// Random tree by the grow method: each node above the depth limit draws a
/// label uniformly from all eight atomics (a null draw ends the branch);
/// leaves pick Null-First or Null-Second with a fair coin.
inline OperatorTree random_tree(int max_depth, RandomStream& rng) {
    if (max_depth < 1) throw std::invalid_argument("random_tree: max_depth must be at least 1");
    std::vector<AtomicOp> nodes;
    detail::grow(nodes, 1, max_depth, rng);
    return OperatorTree(std::move(nodes));
}

inline OperatorTree random_tree(RandomStream& rng) { return random_tree(kDefaultInitDepth, rng); }

/// Uniform node by reservoir sampling over a pre-order walk: the i-th
/// visited node replaces the current pick with probability 1/i.
inline std::size_t random_node(const OperatorTree& t, RandomStream& rng) {
    std::size_t pick = 0;
    for (std::size_t i = 1; i < t.size(); ++i) {
        if (rng.below(i + 1) == 0) pick = i;
    }
    return pick;
}

inline std::span<const AtomicOp> same_arity_labels(AtomicOp op) {
    if (is_null(op)) return kNullOps;
    if (arity(op) == 1) return kUnaryOps;
    return kBinaryOps;
}

/// Relabels one uniformly chosen node with a uniformly chosen label of the
/// same arity class (which may be its current label). Shape is unchanged.
inline OperatorTree mutate_tree(const OperatorTree& t, RandomStream& rng) {
    const std::size_t node = random_node(t, rng);
    const auto candidates = same_arity_labels(t.label(node));
    return t.with_label(node, candidates[rng.below(candidates.size())]);
}

/// Subtree-swap recombination. Draws that would push a child past
/// `max_nodes` are retried; after kRecombineAttempts failures the parents
/// are returned unchanged.
inline std::pair<OperatorTree, OperatorTree> recombine_trees(const OperatorTree& p1, const OperatorTree& p2,
                                                             RandomStream& rng,
                                                             std::size_t max_nodes = kDefaultMaxNodes) {
    for (int attempt = 0; attempt < kRecombineAttempts; ++attempt) {
        const std::size_t n1 = random_node(p1, rng);
        const std::size_t n2 = random_node(p2, rng);
        const std::size_t s1 = p1.subtree_size(n1);
        const std::size_t s2 = p2.subtree_size(n2);
        if (p1.size() - s1 + s2 > max_nodes || p2.size() - s2 + s1 > max_nodes) continue;
        return {p1.with_subtree(n1, p2.subtree(n2)), p2.with_subtree(n2, p1.subtree(n1))};
    }
    return {p1, p2};
}

/// Canonical text form: `(op_id child...)`, leaves `(0)` / `(1)`.
inline std::string serialize(const OperatorTree& t) {
    std::string out;
    std::vector<int> open;  // children still expected by each open node
    for (AtomicOp op : t.preorder()) {
        if (!open.empty()) {
            out.push_back(' ');
            --open.back();
        }
        out.push_back('(');
        out += std::to_string(static_cast<int>(op));
        const int k = child_count(op);
        if (k > 0) {
            open.push_back(k);
            continue;
        }
        out.push_back(')');
        while (!open.empty() && open.back() == 0) {
            open.pop_back();
            out.push_back(')');
        }
    }
    return out;
}

namespace detail {

class TreeParser {
public:
    explicit TreeParser(std::string_view s) : s_(s) {}

    OperatorTree parse() {
        std::vector<AtomicOp> nodes;
        node(nodes);
        skip_ws();
        if (pos_ != s_.size()) fail("trailing characters");
        return OperatorTree(std::move(nodes));
    }

private:
    void node(std::vector<AtomicOp>& out) {
        expect('(');
        skip_ws();
        const std::size_t start = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (start == pos_) fail("expected operator id");
        const AtomicOp op = atomic_from_id(std::stoi(std::string(s_.substr(start, pos_ - start))));
        out.push_back(op);
        for (int c = 0; c < child_count(op); ++c) node(out);
        expect(')');
    }

    void expect(char c) {
        skip_ws();
        if (pos_ >= s_.size() || s_[pos_] != c) fail(std::string("expected '") + c + "'");
        ++pos_;
    }

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw std::invalid_argument("operator tree parse error at offset " + std::to_string(pos_) + ": " + what);
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

}  // namespace detail

inline OperatorTree parse_tree(std::string_view text) { return detail::TreeParser(text).parse(); }

}  // namespace aoea
