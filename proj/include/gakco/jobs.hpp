#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "gakco/bench.hpp"
#include "gakco/error.hpp"
#include "gakco/kernel_core.hpp"
#include "gakco/matrix_io.hpp"
#include "gakco/oracle.hpp"
#include "gakco/sequence_io.hpp"
#include "gakco/trie_baseline.hpp"

namespace gakco {

enum class Command
{
    kernel,
    bench,
    estimate,
    selftest,
};

enum class InputFormat
{
    fasta,
    text,
};

struct JobConfig
{
    Command                              command = Command::kernel;
    std::optional<std::filesystem::path> train;
    std::optional<std::filesystem::path> test; // appended after train
    InputFormat                          input_format = InputFormat::fasta;
    std::optional<std::string>           alphabet;
    KernelParams                         params;
    std::optional<std::filesystem::path> out;
    MatrixFormat                         format = MatrixFormat::dense_tsv;
    bench::GeneratorSpec                 generator;
    bench::Sweep                         sweep = bench::Sweep::point;

    void validate() const
    {
        for (const auto& p : {train, test})
            if (p && !std::filesystem::is_regular_file(*p))
                throw InvalidArgument("input file does not exist: " + p->string());
        if (test && !train)
            throw InvalidArgument("--test requires --train");
        if (command == Command::kernel) {
            if (!train)
                throw InvalidArgument("kernel requires --train");
            if (!out)
                throw InvalidArgument("kernel requires --out");
        }
        params.validate();
    }
};

// Thread count from GAKCO_THREADS, else 1.
inline unsigned default_threads()
{
    if (const char* env = std::getenv("GAKCO_THREADS")) {
        auto v = detail::parse_long(env);
        if (v && *v >= 1)
            return static_cast<unsigned>(*v);
    }
    return 1;
}

struct LoadedCorpus
{
    SequenceCorpus             corpus;
    std::optional<std::size_t> train_boundary; // index of the first test record
};

inline LoadedCorpus load_job_corpus(const JobConfig& cfg)
{
    auto read = [&](const std::filesystem::path& p) {
        return cfg.input_format == InputFormat::text ? read_labeled_text(p) : read_fasta(p);
    };
    auto raw = read(*cfg.train);
    LoadedCorpus out;
    if (cfg.test) {
        out.train_boundary = raw.size();
        auto more          = read(*cfg.test);
        raw.insert(raw.end(), more.begin(), more.end());
    }
    std::optional<std::string_view> alphabet;
    if (cfg.input_format == InputFormat::text)
        alphabet = text_dictionary;
    else if (cfg.alphabet)
        alphabet = *cfg.alphabet;
    out.corpus = encode_corpus(raw, alphabet);
    return out;
}

inline int run_kernel(const JobConfig& cfg, std::ostream& log = std::cerr)
{
    try {
        cfg.validate();
    } catch (const Error& e) {
        log << "error: " << e.what() << '\n';
        return 2;
    }
    try {
        auto loaded = load_job_corpus(cfg);
        auto result = compute_kernel(loaded.corpus, cfg.params);
        write_matrix(result.kernel, cfg.format, *cfg.out, {&result.timing, loaded.train_boundary});
        auto sidecar = *cfg.out;
        sidecar += ".timing.txt";
        write_timing(result.timing, sidecar, loaded.train_boundary);
        log << "wrote " << result.kernel.raw.size() << "x" << result.kernel.raw.size() << " kernel to "
            << cfg.out->string() << '\n';
        return 0;
    } catch (const Error& e) {
        log << "error: " << e.what() << '\n';
        return 1;
    }
}

inline int run_bench_job(const JobConfig& cfg, std::ostream& out, std::ostream& log = std::cerr)
{
    try {
        cfg.params.validate();
        const unsigned multi = cfg.params.threads > 1 ? cfg.params.threads : cfg.params.mismatch_cap() + 1;
        auto           rows  = bench::run_bench(cfg.generator, cfg.params, cfg.sweep, multi);
        if (cfg.out) {
            std::ofstream f(*cfg.out, std::ios::binary | std::ios::trunc);
            if (!f)
                throw Error("cannot write output file: " + cfg.out->string());
            bench::write_rows(rows, f);
        } else {
            bench::write_rows(rows, out);
        }
        return 0;
    } catch (const Error& e) {
        log << "error: " << e.what() << '\n';
        return 1;
    }
}

// Nodelist-size estimate for each M up to the cap, from the input corpus or a synthetic one.
inline int run_estimate(const JobConfig& cfg, std::ostream& out, std::ostream& log = std::cerr)
{
    try {
        cfg.validate();
        auto corpus = cfg.train ? load_job_corpus(cfg).corpus : bench::generate_corpus(cfg.generator);
        auto table  = extract_gmers(corpus, cfg.params.g);
        const auto u = sort_and_count(table).unique_keys();
        out << "g: " << cfg.params.g << "\nk: " << cfg.params.k << "\nsigma: " << corpus.alphabet.size()
            << "\nu: " << u << "\n";
        if (u == 0) {
            out << "no g-mers: every sequence is shorter than g\n";
            return 0;
        }
        for (unsigned m = 0; m <= cfg.params.mismatch_cap(); ++m) {
            auto e = trie::estimate_complexity(u, cfg.params.g, cfg.params.k, corpus.alphabet.size(), m);
            out << "M=" << m << " c_gk: " << e.c_gk << " combinatorial: " << e.combinatorial_term
                << (e.saturated ? " (saturated)" : "") << " eta: " << e.eta
                << (e.clamp_binds() ? " clamp_binds" : "") << '\n';
        }
        return 0;
    } catch (const Error& e) {
        log << "error: " << e.what() << '\n';
        return 1;
    }
}

// Worked two-sequence example plus a seeded sweep against the brute-force oracle.
inline int run_selftest(std::ostream& out, std::size_t instances = 50, std::uint64_t seed = 7)
{
    bool all_ok = true;
    auto report = [&](const std::string& name, bool ok) {
        out << (ok ? "PASS " : "FAIL ") << name << '\n';
        all_ok = all_ok && ok;
    };
    try {
        std::vector<RawRecord> raw{{"S", std::nullopt, "ACACA"}, {"T", std::nullopt, "AAACA"}};
        auto                   corpus = encode_corpus(raw, std::string_view("ACGT"));
        KernelParams           p{.g = 3, .k = 2};
        auto                   r = compute_kernel(corpus, p);
        report("two-sequence example N_0(S,T)=2", r.profiles.exact[0](0, 1) == 2);
        report("two-sequence example C_1(S,T)=9", r.profiles.cumulative[1](0, 1) == 9);
        report("two-sequence example N_1(S,T)=3", r.profiles.exact[1](0, 1) == 3);
        report("two-sequence example K=[[15,9],[9,13]]",
               r.kernel.raw(0, 0) == 15 && r.kernel.raw(0, 1) == 9 && r.kernel.raw(1, 1) == 13);

        std::mt19937_64 rng(seed);
        std::size_t     bad = 0;
        for (std::size_t t = 0; t < instances; ++t) {
            bench::GeneratorSpec spec;
            spec.n_sequences = 1 + rng() % 8;
            spec.length      = 1 + rng() % 25;
            spec.sigma       = std::array<std::size_t, 3>{4, 20, 36}[rng() % 3];
            spec.seed        = rng();
            const unsigned g = 2 + rng() % 5;
            const unsigned k = 1 + rng() % g;
            auto           c = bench::generate_corpus(spec);
            auto           res = compute_kernel(c, KernelParams{.g = g, .k = k});
            auto           table  = extract_gmers(c, g);
            auto           oracle = oracle::pairwise_kernel(oracle::brute_force_profiles(table, g - k), g, k);
            bad += !(oracle == res.kernel.raw);
        }
        report("random oracle sweep (" + std::to_string(instances) + " instances)", bad == 0);
    } catch (const Error& e) {
        out << "FAIL exception: " << e.what() << '\n';
        return 1;
    }
    return all_ok ? 0 : 1;
}

} // namespace gakco
