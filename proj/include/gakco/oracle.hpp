#pragma once

#include <map>
#include <span>
#include <utility>
#include <vector>

#include "gakco/binomial.hpp"
#include "gakco/error.hpp"
#include "gakco/gmer_engine.hpp"
#include "gakco/sequence_io.hpp"
#include "gakco/symmetric_matrix.hpp"

// Reference implementations used to certify the counting engine. They share
// nothing with it beyond the table and matrix containers and are quadratic in
// the number of g-mers: test scale only.
namespace gakco::oracle {

// N_d for d = 0..max_mismatch by scanning every ordered pair of g-mer records.
inline std::vector<CountMatrix> brute_force_profiles(const GMerTable& table, unsigned max_mismatch)
{
    const std::size_t n = table.n_sequences;
    std::vector<std::vector<count_t>> dense(max_mismatch + 1, std::vector<count_t>(n * n, 0));

    for (std::size_t a = 0; a < table.total(); ++a) {
        const symbol_t* ka = table.keys.data() + a * table.width;
        for (std::size_t b = 0; b < table.total(); ++b) {
            const symbol_t* kb = table.keys.data() + b * table.width;
            unsigned        d  = 0;
            for (unsigned p = 0; p < table.width && d <= max_mismatch; ++p)
                if (ka[p] != kb[p])
                    ++d;
            if (d <= max_mismatch)
                ++dense[d][table.seq[a] * n + table.seq[b]];
        }
    }

    std::vector<CountMatrix> out;
    for (const auto& m : dense)
        out.push_back(CountMatrix::from_dense(n, m));
    return out;
}

// Kernel by the pairwise form: each g-mer pair at distance d shares C(g-d, k) gapped k-mers.
inline CountMatrix pairwise_kernel(std::span<const CountMatrix> profiles, unsigned g, unsigned k)
{
    CountMatrix raw(profiles.front().size());
    for (std::size_t d = 0; d < profiles.size(); ++d) {
        const count_t h = g - d >= k ? binomial(static_cast<unsigned>(g - d), k) : 0;
        for (std::size_t i = 0; i < raw.size(); ++i)
            for (std::size_t j = i; j < raw.size(); ++j)
                raw(i, j) = checked::add(raw(i, j), checked::mul(profiles[d](i, j), h));
    }
    return raw;
}

struct FeatureMapLimits
{
    std::size_t max_features = 5'000'000; // distinct (mask, symbols) features across the corpus
};

// Explicit gapped k-mer feature vectors: for every observed g-mer and every
// k-subset of its positions, the feature is (position mask, symbols kept).
// The kernel is the pairwise dot product of the sparse count vectors.
inline CountMatrix feature_map_kernel(const SequenceCorpus& corpus, unsigned g, unsigned k,
                                      FeatureMapLimits limits = {})
{
    if (k < 1 || k > g)
        throw InvalidArgument("require 1 <= k <= g");
    if (g > 64)
        throw InvalidArgument("feature map oracle supports g <= 64");

    using Feature = std::pair<std::uint64_t, std::vector<symbol_t>>;
    std::vector<std::vector<unsigned>> masks;
    {
        // k-subsets of {0..g-1} by bitmask enumeration
        for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << g); ++bits)
            if (static_cast<unsigned>(__builtin_popcountll(bits)) == k) {
                std::vector<unsigned> pos;
                for (unsigned p = 0; p < g; ++p)
                    if (bits >> p & 1)
                        pos.push_back(p);
                masks.push_back(std::move(pos));
            }
    }

    std::map<Feature, std::size_t>                      ids;
    std::vector<std::map<std::size_t, count_t>>         vectors(corpus.n_sequences());
    for (std::size_t s = 0; s < corpus.n_sequences(); ++s) {
        const auto& codes = corpus.records[s].codes;
        for (std::size_t start = 0; start + g <= codes.size(); ++start)
            for (const auto& mask : masks) {
                Feature f;
                for (auto p : mask) {
                    f.first |= std::uint64_t{1} << p;
                    f.second.push_back(codes[start + p]);
                }
                auto [it, fresh] = ids.try_emplace(std::move(f), ids.size());
                if (fresh && ids.size() > limits.max_features)
                    throw InvalidArgument("feature map exceeds its feature limit; use a smaller g");
                ++vectors[s][it->second];
            }
    }

    CountMatrix raw(corpus.n_sequences());
    for (std::size_t i = 0; i < vectors.size(); ++i)
        for (std::size_t j = i; j < vectors.size(); ++j) {
            count_t dot = 0;
            auto    a = vectors[i].begin(), b = vectors[j].begin();
            while (a != vectors[i].end() && b != vectors[j].end()) {
                if (a->first < b->first)
                    ++a;
                else if (b->first < a->first)
                    ++b;
                else {
                    dot = checked::add(dot, checked::mul(a->second, b->second));
                    ++a;
                    ++b;
                }
            }
            raw(i, j) = dot;
        }
    return raw;
}

} // namespace gakco::oracle
