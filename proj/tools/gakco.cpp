#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "gakco/jobs.hpp"

int main(int argc, char** argv)
{
    using namespace gakco;

    CLI::App app{"Gapped k-mer string kernels by cumulative sort-and-count"};
    app.set_help_flag("-h,--help", "Print help");

    JobConfig   cfg;
    std::string train, test, out, alphabet;
    unsigned    max_mismatch = 0;
    unsigned    threads      = default_threads();
    bool        normalize    = true;

    const std::map<std::string, Command> commands{
      {"kernel", Command::kernel}, {"bench", Command::bench}, {"estimate", Command::estimate},
      {"selftest", Command::selftest}};
    const std::map<std::string, MatrixFormat> formats{
      {"dense", MatrixFormat::dense_tsv}, {"svm", MatrixFormat::precomputed_svm}, {"report", MatrixFormat::report}};
    const std::map<std::string, InputFormat> inputs{{"fasta", InputFormat::fasta}, {"text", InputFormat::text}};
    const std::map<std::string, bench::Sweep> sweeps{
      {"point", bench::Sweep::point}, {"k", bench::Sweep::k}, {"n", bench::Sweep::n}};

    app.add_option("--cmd", cfg.command, "kernel | bench | estimate | selftest")
      ->transform(CLI::CheckedTransformer(commands, CLI::ignore_case))
      ->default_str("kernel");
    app.add_option("-g", cfg.params.g, "g-mer length")->check(CLI::Range(1u, 64u));
    app.add_option("-k", cfg.params.k, "non-gap positions per g-mer")->check(CLI::Range(1u, 64u));
    auto* mm = app.add_option("--max-mismatch", max_mismatch, "cap on mismatches summed (default g-k)");
    app.add_option("--threads", threads, "worker threads (default $GAKCO_THREADS or 1)")->check(CLI::PositiveNumber);
    app.add_flag("--two-level", cfg.params.two_level_parallel, "also parallelize over position sets within one m");
    app.add_flag("--normalize,!--no-normalize", normalize, "cosine-normalize the kernel (default on)");
    app.add_option("--format", cfg.format, "dense | svm | report")
      ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case))
      ->default_str("dense");
    app.add_option("--input-format", cfg.input_format, "fasta | text (<label><TAB><text> lines)")
      ->transform(CLI::CheckedTransformer(inputs, CLI::ignore_case))
      ->default_str("fasta");
    app.add_option("--alphabet", alphabet, "explicit symbol list for FASTA input, e.g. ACGT");
    app.add_option("--train", train, "training sequences");
    app.add_option("--test", test, "test sequences, appended after the training set");
    app.add_option("--out", out, "output path");
    app.add_option("--seed", cfg.generator.seed, "generator seed");
    app.add_option("--gen-n", cfg.generator.n_sequences, "synthetic sequence count");
    app.add_option("--gen-l", cfg.generator.length, "synthetic sequence length");
    app.add_option("--gen-sigma", cfg.generator.sigma, "synthetic alphabet size");
    app.add_option("--gen-skew", cfg.generator.skew, "Zipf exponent for synthetic symbols (0 = uniform)");
    app.add_option("--sweep", cfg.sweep, "bench sweep: point | k | n")
      ->transform(CLI::CheckedTransformer(sweeps, CLI::ignore_case))
      ->default_str("point");

    CLI11_PARSE(app, argc, argv);

    if (!train.empty())
        cfg.train = train;
    if (!test.empty())
        cfg.test = test;
    if (!out.empty())
        cfg.out = out;
    if (!alphabet.empty())
        cfg.alphabet = alphabet;
    if (mm->count() > 0)
        cfg.params.max_mismatch = max_mismatch;
    cfg.params.threads   = threads;
    cfg.params.normalize = normalize;

    if (cfg.command != Command::selftest && (cfg.params.g == 0 || cfg.params.k == 0)) {
        std::cerr << "error: -g and -k are required\n";
        return 2;
    }

    switch (cfg.command) {
    case Command::kernel: return run_kernel(cfg);
    case Command::bench: return run_bench_job(cfg, std::cout);
    case Command::estimate: return run_estimate(cfg, std::cout);
    case Command::selftest: return run_selftest(std::cout);
    }
    return 2;
}
