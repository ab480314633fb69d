#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "gakco/error.hpp"
#include "gakco/gmer_engine.hpp"
#include "gakco/kernel_core.hpp"
#include "gakco/sequence_io.hpp"
#include "gakco/trie_baseline.hpp"

namespace gakco::bench {

// Symbols drawn for synthetic corpora, in rank order (rank 0 is most frequent under skew).
inline constexpr std::string_view symbol_pool = "ACGTDEFHIKLMNPQRSVWYBJOUXZ0123456789";

struct GeneratorSpec
{
    std::size_t   n_sequences = 100;
    std::size_t   length      = 100;
    std::size_t   sigma       = 20;
    std::uint64_t seed        = 1;
    double        skew        = 0.0; // Zipf exponent; 0 is uniform
};

inline SequenceCorpus generate_corpus(const GeneratorSpec& spec)
{
    if (spec.sigma < 1 || spec.sigma > symbol_pool.size())
        throw InvalidArgument("synthetic sigma must be in [1, " + std::to_string(symbol_pool.size()) + "]");
    if (spec.skew < 0)
        throw InvalidArgument("skew must be non-negative");

    std::vector<double> weights(spec.sigma);
    for (std::size_t r = 0; r < spec.sigma; ++r)
        weights[r] = 1.0 / std::pow(static_cast<double>(r + 1), spec.skew);

    std::mt19937_64                 rng(spec.seed);
    std::discrete_distribution<int> pick(weights.begin(), weights.end());

    std::vector<RawRecord> raw(spec.n_sequences);
    for (std::size_t s = 0; s < spec.n_sequences; ++s) {
        raw[s].id = "syn" + std::to_string(s);
        raw[s].text.resize(spec.length);
        for (auto& c : raw[s].text)
            c = symbol_pool[pick(rng)];
    }
    return encode_corpus(raw, symbol_pool.substr(0, spec.sigma));
}

struct BenchResult
{
    std::size_t n_sequences = 0;
    std::size_t length      = 0;
    std::size_t sigma       = 0;
    unsigned    g = 0, k = 0, max_mismatch = 0;
    unsigned    multi_threads = 1;

    double gakco_single = 0;
    double gakco_multi  = 0;
    double trie         = 0;

    std::size_t   u   = 0;
    std::size_t   z   = 0;
    std::uint64_t eta = 0;
    bool          eta_clamped = false;
    bool          agreement   = false;
};

namespace detail {

inline std::string first_difference(const CountMatrix& a, const CountMatrix& b)
{
    if (a.size() != b.size())
        return "size " + std::to_string(a.size()) + " vs " + std::to_string(b.size());
    std::size_t diff = 0;
    std::string first;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = i; j < a.size(); ++j)
            if (a(i, j) != b(i, j)) {
                if (diff++ == 0)
                    first = "(" + std::to_string(i) + "," + std::to_string(j) + "): " + std::to_string(a(i, j)) +
                            " vs " + std::to_string(b(i, j));
            }
    return std::to_string(diff) + " differing cells, first " + first;
}

} // namespace detail

// Trie baseline end to end: extract, nodelist profiles, assembly.
inline CountMatrix trie_kernel(const SequenceCorpus& corpus, const KernelParams& params)
{
    params.validate();
    auto table   = extract_gmers(corpus, params.g);
    auto profile = trie::trie_profiles(table, params.mismatch_cap());
    return assemble_kernel(profile, coefficients(params.g, params.k), params.mismatch_cap());
}

// Times GaKCo single-thread, GaKCo multi-thread and the trie baseline on one
// corpus. Throws ConsistencyError if their kernels differ.
inline BenchResult run_point(const SequenceCorpus& corpus, KernelParams params, unsigned multi_threads)
{
    using clock = std::chrono::steady_clock;
    params.normalize = false;
    params.validate();

    BenchResult row;
    row.n_sequences = corpus.n_sequences();
    for (const auto& r : corpus.records)
        row.length = std::max(row.length, r.length());
    row.sigma         = corpus.alphabet.size();
    row.g             = params.g;
    row.k             = params.k;
    row.max_mismatch  = params.mismatch_cap();
    row.multi_threads = multi_threads;

    auto single_params    = params;
    single_params.threads = 1;
    auto t0               = clock::now();
    auto single           = compute_kernel(corpus, single_params);
    row.gakco_single      = std::chrono::duration<double>(clock::now() - t0).count();

    auto multi_params    = params;
    multi_params.threads = multi_threads;
    t0                   = clock::now();
    auto multi           = compute_kernel(corpus, multi_params);
    row.gakco_multi      = std::chrono::duration<double>(clock::now() - t0).count();

    t0            = clock::now();
    auto trie_raw = trie_kernel(corpus, params);
    row.trie      = std::chrono::duration<double>(clock::now() - t0).count();

    if (!(single.kernel.raw == multi.kernel.raw))
        throw ConsistencyError("GaKCo single vs multi-thread kernels differ: " +
                               detail::first_difference(single.kernel.raw, multi.kernel.raw));
    if (!(single.kernel.raw == trie_raw))
        throw ConsistencyError("GaKCo vs trie kernels differ: " +
                               detail::first_difference(single.kernel.raw, trie_raw));
    row.agreement = true;

    row.u = single.profiles.u;
    row.z = single.profiles.z;
    if (row.u > 0) {
        auto est        = trie::estimate_complexity(row.u, params.g, params.k, row.sigma, row.max_mismatch);
        row.eta         = est.eta;
        row.eta_clamped = est.clamp_binds();
    }
    return row;
}

enum class Sweep
{
    point, // one parameter point
    k,     // k = 1..g-1 at fixed g
    n,     // N in {100, 250, 500, 750}
};

inline std::vector<BenchResult> run_bench(const GeneratorSpec& gen, const KernelParams& params, Sweep sweep,
                                          unsigned multi_threads)
{
    std::vector<BenchResult> rows;
    switch (sweep) {
    case Sweep::point: rows.push_back(run_point(generate_corpus(gen), params, multi_threads)); break;
    case Sweep::k: {
        auto corpus = generate_corpus(gen);
        for (unsigned k = 1; k < params.g; ++k) {
            auto p         = params;
            p.k            = k;
            p.max_mismatch = std::nullopt;
            rows.push_back(run_point(corpus, p, multi_threads));
        }
        break;
    }
    case Sweep::n:
        for (std::size_t n : {100, 250, 500, 750}) {
            auto spec        = gen;
            spec.n_sequences = n;
            rows.push_back(run_point(generate_corpus(spec), params, multi_threads));
        }
        break;
    }
    return rows;
}

inline void write_rows(const std::vector<BenchResult>& rows, std::ostream& out)
{
    out << "N\tl\tsigma\tg\tk\tM\tthreads\tgakco_single_s\tgakco_multi_s\ttrie_s\ttrie_over_gakco\tu\tz\teta\teta_"
           "clamped\tagreement\n";
    char buf[256];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%zu\t%zu\t%zu\t%u\t%u\t%u\t%u\t%.3f\t%.3f\t%.3f\t%.2f\t%zu\t%zu\t%llu\t%d\t%d\n",
                      r.n_sequences, r.length, r.sigma, r.g, r.k, r.max_mismatch, r.multi_threads, r.gakco_single,
                      r.gakco_multi, r.trie, r.gakco_single > 0 ? r.trie / r.gakco_single : 0.0, r.u, r.z,
                      static_cast<unsigned long long>(r.eta), r.eta_clamped ? 1 : 0, r.agreement ? 1 : 0);
        out << buf;
    }
}

} // namespace gakco::bench
