#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "gakco/binomial.hpp"
#include "gakco/error.hpp"
#include "gakco/sequence_io.hpp"
#include "gakco/symmetric_matrix.hpp"

namespace gakco {

using seq_index_t = std::uint32_t;

// Flat array of fixed-width symbol keys, each tagged with its source sequence.
// Holds freshly extracted g-mers (width == g) as well as projections of them.
struct GMerTable
{
    unsigned                 width       = 0;
    std::size_t              n_sequences = 0;
    std::size_t              sigma       = 0;
    std::vector<symbol_t>    keys; // total() * width codes
    std::vector<seq_index_t> seq;

    std::size_t total() const noexcept { return seq.size(); }

    std::span<const symbol_t> key(std::size_t i) const noexcept
    {
        return std::span<const symbol_t>(keys).subspan(i * width, width);
    }
};

using ProjectedTable = GMerTable;

// Sorted indices (0..g-1) of the positions dropped by a projection.
struct PositionSet
{
    std::vector<unsigned> removed;

    std::size_t size() const noexcept { return removed.size(); }
    friend bool operator==(const PositionSet&, const PositionSet&)  = default;
    friend auto operator<=>(const PositionSet&, const PositionSet&) = default;
};

struct SeqCount
{
    seq_index_t seq;
    count_t     count;

    friend bool operator==(const SeqCount&, const SeqCount&) = default;
};

// One entry per run of identical keys with at least two records; each group is
// the list of (sequence, occurrences) pairs in ascending sequence order.
// Keys seen exactly once form no group; only their source sequence is kept,
// since such a record still pairs with itself on the diagonal.
class GroupList
{
  public:
    using Group = std::span<const SeqCount>;

    std::size_t size() const noexcept { return offsets_.size() - 1; }
    bool        empty() const noexcept { return size() == 0; }
    Group       operator[](std::size_t i) const
    {
        return std::span<const SeqCount>(entries_).subspan(offsets_[i], offsets_[i + 1] - offsets_[i]);
    }

    // Distinct keys seen, singleton runs included.
    std::size_t unique_keys() const noexcept { return unique_keys_; }

    // Source sequence of every singleton key, in sorted key order.
    std::span<const seq_index_t> singletons() const noexcept { return singletons_; }

    void begin_run() { run_start_ = entries_.size(); run_total_ = 0; }
    void push(seq_index_t s, count_t c)
    {
        entries_.push_back({s, c});
        run_total_ += c;
    }
    void end_run()
    {
        ++unique_keys_;
        if (run_total_ >= 2) {
            offsets_.push_back(entries_.size());
        } else {
            singletons_.push_back(entries_.back().seq);
            entries_.resize(run_start_);
        }
    }

  private:
    std::vector<std::size_t> offsets_{0};
    std::vector<SeqCount>    entries_;
    std::vector<seq_index_t> singletons_;
    std::size_t              unique_keys_ = 0;
    std::size_t              run_start_   = 0;
    count_t                  run_total_   = 0;
};

inline GMerTable extract_gmers(const SequenceCorpus& corpus, unsigned g)
{
    if (g == 0)
        throw InvalidArgument("g must be at least 1");
    if (corpus.n_sequences() > std::numeric_limits<seq_index_t>::max())
        throw InvalidArgument("too many sequences");

    GMerTable t;
    t.width       = g;
    t.n_sequences = corpus.n_sequences();
    t.sigma       = corpus.alphabet.size();

    std::size_t total = 0;
    for (const auto& r : corpus.records)
        if (r.length() >= g)
            total += r.length() - g + 1;
    t.keys.reserve(total * g);
    t.seq.reserve(total);

    for (std::size_t s = 0; s < corpus.records.size(); ++s) {
        const auto& codes = corpus.records[s].codes;
        if (codes.size() < g)
            continue;
        for (std::size_t start = 0; start + g <= codes.size(); ++start) {
            t.keys.insert(t.keys.end(), codes.begin() + start, codes.begin() + start + g);
            t.seq.push_back(static_cast<seq_index_t>(s));
        }
    }
    return t;
}

// All m-subsets of {0..g-1}, lexicographic.
inline std::vector<PositionSet> enumerate_position_sets(unsigned g, unsigned m)
{
    if (m > g)
        throw InvalidArgument("cannot remove more positions than the g-mer has");
    std::vector<PositionSet> out;
    out.reserve(binomial(g, m));

    std::vector<unsigned> cur(m);
    std::iota(cur.begin(), cur.end(), 0u);
    while (true) {
        out.push_back({cur});
        // advance the rightmost index that still has room
        int i = static_cast<int>(m) - 1;
        while (i >= 0 && cur[i] == g - m + static_cast<unsigned>(i))
            --i;
        if (i < 0)
            break;
        ++cur[i];
        for (unsigned j = static_cast<unsigned>(i) + 1; j < m; ++j)
            cur[j] = cur[j - 1] + 1;
    }
    return out;
}

inline ProjectedTable project(const GMerTable& table, const PositionSet& pos)
{
    std::vector<bool> drop(table.width, false);
    for (std::size_t i = 0; i < pos.removed.size(); ++i) {
        auto r = pos.removed[i];
        if (r >= table.width)
            throw InvalidArgument("removed position out of range");
        if (i > 0 && pos.removed[i - 1] >= r)
            throw InvalidArgument("position set must be strictly increasing");
        drop[r] = true;
    }
    std::vector<unsigned> keep;
    for (unsigned p = 0; p < table.width; ++p)
        if (!drop[p])
            keep.push_back(p);

    ProjectedTable out;
    out.width       = static_cast<unsigned>(keep.size());
    out.n_sequences = table.n_sequences;
    out.sigma       = table.sigma;
    out.seq         = table.seq;
    out.keys.resize(table.total() * keep.size());

    auto dst = out.keys.begin();
    for (std::size_t i = 0; i < table.total(); ++i) {
        const symbol_t* src = table.keys.data() + i * table.width;
        for (auto p : keep)
            *dst++ = src[p];
    }
    return out;
}

namespace detail {

inline unsigned bits_for(std::size_t distinct_values)
{
    return distinct_values <= 1 ? 0u : static_cast<unsigned>(std::bit_width(distinct_values - 1));
}

template<typename SameKey, typename SeqOf>
void collect_runs(std::size_t n, SameKey&& same_key, SeqOf&& seq_of, GroupList& out)
{
    std::size_t i = 0;
    while (i < n) {
        out.begin_run();
        std::size_t j = i;
        while (j < n && same_key(i, j)) {
            std::size_t k = j;
            while (k < n && seq_of(k) == seq_of(j) && same_key(i, k))
                ++k;
            out.push(seq_of(j), k - j);
            j = k;
        }
        out.end_run();
        i = j;
    }
}

} // namespace detail

// Sorts records by (key, sequence) and reports every run of equal keys that
// has two or more records. Keys that pack into one machine word are sorted as
// integers; wider keys fall back to a lexicographic index sort.
inline GroupList sort_and_count(const ProjectedTable& table)
{
    GroupList         out;
    const std::size_t n = table.total();
    if (n == 0)
        return out;

    const std::size_t max_code = table.keys.empty() ? 0 : *std::max_element(table.keys.begin(), table.keys.end());
    const unsigned    sym_bits = std::max(1u, detail::bits_for(std::max(table.sigma, max_code + 1)));
    const unsigned seq_bits = detail::bits_for(table.n_sequences);
    const unsigned key_bits = sym_bits * table.width;

    auto pack = [&](std::size_t i) {
        std::uint64_t   k   = 0;
        const symbol_t* src = table.keys.data() + i * table.width;
        for (unsigned p = 0; p < table.width; ++p)
            k = (k << sym_bits) | src[p];
        return k;
    };

    if (key_bits + seq_bits <= 64) {
        std::vector<std::uint64_t> packed(n);
        for (std::size_t i = 0; i < n; ++i)
            packed[i] = seq_bits == 0 ? pack(i) : (pack(i) << seq_bits) | table.seq[i];
        std::sort(packed.begin(), packed.end());
        const std::uint64_t seq_mask = seq_bits == 0 ? 0 : (~std::uint64_t{0} >> (64 - seq_bits));
        detail::collect_runs(
          n, [&](std::size_t a, std::size_t b) { return (packed[a] >> seq_bits) == (packed[b] >> seq_bits); },
          [&](std::size_t a) { return static_cast<seq_index_t>(packed[a] & seq_mask); }, out);
    } else if (key_bits <= 64) {
        std::vector<std::pair<std::uint64_t, seq_index_t>> packed(n);
        for (std::size_t i = 0; i < n; ++i)
            packed[i] = {pack(i), table.seq[i]};
        std::sort(packed.begin(), packed.end());
        detail::collect_runs(
          n, [&](std::size_t a, std::size_t b) { return packed[a].first == packed[b].first; },
          [&](std::size_t a) { return packed[a].second; }, out);
    } else {
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            auto ka = table.key(a), kb = table.key(b);
            auto c  = std::lexicographical_compare_three_way(ka.begin(), ka.end(), kb.begin(), kb.end());
            return c != 0 ? c < 0 : table.seq[a] < table.seq[b];
        });
        detail::collect_runs(
          n,
          [&](std::size_t a, std::size_t b) {
              auto ka = table.key(order[a]), kb = table.key(order[b]);
              return std::equal(ka.begin(), ka.end(), kb.begin());
          },
          [&](std::size_t a) { return table.seq[order[a]]; }, out);
    }
    return out;
}

// Adds the outer product of each group's count vector into target, plus the
// self-pair of every singleton key on its sequence's diagonal.
inline void accumulate_groups(const GroupList& groups, CountMatrix& target)
{
    for (auto s : groups.singletons()) {
        if (s >= target.size())
            throw InvalidArgument("group references a sequence outside the matrix");
        target(s, s) = checked::add(target(s, s), 1);
    }
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
        auto grp = groups[gi];
        for (std::size_t a = 0; a < grp.size(); ++a) {
            if (grp[a].seq >= target.size())
                throw InvalidArgument("group references a sequence outside the matrix");
            const count_t ca = grp[a].count;
            for (std::size_t b = a; b < grp.size(); ++b) {
                auto& cell = target(grp[a].seq, grp[b].seq);
                cell       = checked::add(cell, checked::mul(ca, grp[b].count));
            }
        }
    }
}

inline unsigned hamming(std::span<const symbol_t> a, std::span<const symbol_t> b)
{
    unsigned d = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        d += a[i] != b[i];
    return d;
}

} // namespace gakco
