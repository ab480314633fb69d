#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include "gakco/binomial.hpp"
#include "gakco/error.hpp"
#include "gakco/gmer_engine.hpp"
#include "gakco/symmetric_matrix.hpp"

// Trie/nodelist mismatch-profile engine in the style of gkm-SVM, plus the
// analytic nodelist-size estimate used to compare the two cost models.
namespace gakco::trie {

struct Node
{
    // Sorted by symbol.
    std::vector<std::pair<symbol_t, std::uint32_t>> children;
    // Leaves reachable below this node occupy [leaf_begin, leaf_end) in DFS order.
    std::uint32_t leaf_begin = 0;
    std::uint32_t leaf_end   = 0;
    // Valid at depth g only.
    std::int64_t leaf = -1;
};

// Trie over the distinct g-mers of a table.
class Trie
{
  public:
    explicit Trie(const GMerTable& table)
      : depth_(table.width)
    {
        if (table.width == 0)
            throw InvalidArgument("trie requires g >= 1");
        nodes_.emplace_back();

        // Insert keys in sorted (key, seq) order so child lists stay sorted
        // and leaf numbering follows DFS order.
        std::vector<std::size_t> order(table.total());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            auto ka = table.key(a), kb = table.key(b);
            if (!std::equal(ka.begin(), ka.end(), kb.begin()))
                return std::lexicographical_compare(ka.begin(), ka.end(), kb.begin(), kb.end());
            return table.seq[a] < table.seq[b];
        });

        for (auto r : order) {
            std::uint32_t cur = 0;
            for (auto sym : table.key(r)) {
                auto& kids = nodes_[cur].children;
                if (kids.empty() || kids.back().first != sym) {
                    kids.emplace_back(sym, static_cast<std::uint32_t>(nodes_.size()));
                    nodes_.emplace_back();
                }
                cur = nodes_[cur].children.back().second;
            }
            auto& node = nodes_[cur];
            if (node.leaf < 0) {
                node.leaf = static_cast<std::int64_t>(payload_.size());
                payload_.emplace_back();
            }
            auto& counts = payload_[node.leaf];
            if (!counts.empty() && counts.back().seq == table.seq[r])
                ++counts.back().count;
            else
                counts.push_back({table.seq[r], 1});
        }
        number_leaves(0);
    }

    unsigned    depth() const noexcept { return depth_; }
    std::size_t leaf_count() const noexcept { return payload_.size(); }
    std::size_t node_count() const noexcept { return nodes_.size(); }

    const std::vector<Node>& nodes() const noexcept { return nodes_; }
    // Per-sequence occurrence counts of leaf i, ascending by sequence.
    const std::vector<SeqCount>& leaf_counts(std::size_t i) const { return payload_[i]; }

    // Leaves within Hamming distance max_mismatch of `key`, as (leaf, distance),
    // restricted to leaves numbered >= min_leaf.
    template<typename Visit>
    void neighbours(std::span<const symbol_t> key, unsigned max_mismatch, std::size_t min_leaf, Visit&& visit) const
    {
        walk(0, 0, key, max_mismatch, 0, min_leaf, visit);
    }

  private:
    void number_leaves(std::uint32_t root)
    {
        // iterative DFS; leaves were created in lexicographic order already
        struct Frame
        {
            std::uint32_t node;
            std::size_t   next_child;
        };
        std::vector<Frame> stack{{root, 0}};
        std::uint32_t      next_leaf = 0;
        nodes_[root].leaf_begin      = 0;
        while (!stack.empty()) {
            auto& f    = stack.back();
            auto& node = nodes_[f.node];
            if (f.next_child == 0 && node.leaf >= 0) {
                node.leaf_begin = next_leaf;
                node.leaf_end   = ++next_leaf;
                stack.pop_back();
                continue;
            }
            if (f.next_child < node.children.size()) {
                auto child = node.children[f.next_child++].second;
                nodes_[child].leaf_begin = next_leaf;
                stack.push_back({child, 0});
            } else {
                node.leaf_end = next_leaf;
                stack.pop_back();
            }
        }
    }

    template<typename Visit>
    void walk(std::uint32_t id, unsigned depth, std::span<const symbol_t> key, unsigned budget, unsigned used,
              std::size_t min_leaf, Visit& visit) const
    {
        const auto& node = nodes_[id];
        if (node.leaf_end <= min_leaf)
            return;
        if (depth == depth_) {
            visit(static_cast<std::size_t>(node.leaf), used);
            return;
        }
        for (const auto& [sym, child] : node.children) {
            const unsigned cost = used + (sym != key[depth]);
            if (cost <= budget)
                walk(child, depth + 1, key, budget, cost, min_leaf, visit);
        }
    }

    unsigned                           depth_;
    std::vector<Node>                  nodes_;
    std::vector<std::vector<SeqCount>> payload_;
};

// N_0..N_M via per-leaf pruned traversal. Each unordered leaf pair is visited
// once (from the lower-numbered leaf) and mirrored.
inline std::vector<CountMatrix> trie_profiles(const GMerTable& table, unsigned max_mismatch)
{
    std::vector<CountMatrix> out(max_mismatch + 1, CountMatrix(table.n_sequences));
    if (table.total() == 0)
        return out;
    Trie trie(table);

    // key of each leaf, for driving the traversal
    std::vector<std::vector<symbol_t>> leaf_key(trie.leaf_count());
    {
        std::vector<symbol_t> path;
        auto rec = [&](auto&& self, std::uint32_t id) -> void {
            const auto& node = trie.nodes()[id];
            if (node.leaf >= 0) {
                leaf_key[node.leaf] = path;
                return;
            }
            for (const auto& [sym, child] : node.children) {
                path.push_back(sym);
                self(self, child);
                path.pop_back();
            }
        };
        rec(rec, 0);
    }

    for (std::size_t leaf = 0; leaf < trie.leaf_count(); ++leaf) {
        const auto& mine = trie.leaf_counts(leaf);
        trie.neighbours(leaf_key[leaf], max_mismatch, leaf, [&](std::size_t other, unsigned d) {
            auto& target = out[d];
            if (other == leaf) {
                for (std::size_t a = 0; a < mine.size(); ++a)
                    for (std::size_t b = a; b < mine.size(); ++b) {
                        auto& cell = target(mine[a].seq, mine[b].seq);
                        cell       = checked::add(cell, checked::mul(mine[a].count, mine[b].count));
                    }
                return;
            }
            for (const auto& x : trie.leaf_counts(other))
                for (const auto& y : mine) {
                    count_t v = checked::mul(x.count, y.count);
                    if (x.seq == y.seq)
                        v = checked::mul(v, 2);
                    auto& cell = target(x.seq, y.seq);
                    cell       = checked::add(cell, v);
                }
        });
    }
    return out;
}

struct NodelistEstimate
{
    std::uint64_t u                   = 0;
    std::uint64_t c_gk                = 0; // sum_{m=0}^{M} C(g, m)
    std::uint64_t combinatorial_term  = 0; // sum_{m=0}^{M} C(g, m) (Sigma-1)^m, saturating
    bool          saturated           = false;
    std::uint64_t eta                 = 0; // min(u, combinatorial_term)

    bool clamp_binds() const noexcept { return combinatorial_term > u || saturated; }
};

inline NodelistEstimate estimate_complexity(std::uint64_t u, unsigned g, unsigned k, std::uint64_t sigma,
                                            unsigned max_mismatch)
{
    if (u < 1 || g < 1 || k < 1 || sigma < 1)
        throw InvalidArgument("estimate inputs must be >= 1");
    if (k > g || max_mismatch > g - k)
        throw InvalidArgument("require k <= g and M <= g - k");

    constexpr auto   top = std::numeric_limits<std::uint64_t>::max();
    NodelistEstimate e;
    e.u = u;
    auto sat_add = [&](std::uint64_t a, std::uint64_t b) {
        std::uint64_t r;
        if (__builtin_add_overflow(a, b, &r)) {
            e.saturated = true;
            return top;
        }
        return r;
    };
    auto sat_mul = [&](std::uint64_t a, std::uint64_t b) {
        std::uint64_t r;
        if (__builtin_mul_overflow(a, b, &r)) {
            e.saturated = true;
            return top;
        }
        return r;
    };

    std::uint64_t power = 1;
    for (unsigned m = 0; m <= max_mismatch; ++m) {
        const auto c = try_binomial(g, m);
        const std::uint64_t cm = c ? *c : top;
        if (!c)
            e.saturated = true;
        e.c_gk               = sat_add(e.c_gk, cm);
        e.combinatorial_term = sat_add(e.combinatorial_term, sat_mul(cm, power));
        if (m < max_mismatch)
            power = sat_mul(power, sigma - 1);
    }
    e.eta = std::min(u, e.combinatorial_term);
    return e;
}

} // namespace gakco::trie
