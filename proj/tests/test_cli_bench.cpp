#include <gtest/gtest.h>

#include <sstream>

#include "gakco/bench.hpp"
#include "gakco/jobs.hpp"
#include "gakco/matrix_io.hpp"
#include "test_util.hpp"

using namespace gakco;
using gakco::test_support::fig2_corpus;
using gakco::test_support::slurp;
using gakco::test_support::TempDir;

namespace {

constexpr const char* fig2_fasta = ">S 1\nACACA\n>T 0\nAAACA\n";

JobConfig kernel_job(const TempDir& d, bool normalize, MatrixFormat format = MatrixFormat::dense_tsv)
{
    JobConfig cfg;
    cfg.command          = Command::kernel;
    cfg.train            = d.write("in.fa", fig2_fasta);
    cfg.alphabet         = "ACGT";
    cfg.params           = {.g = 3, .k = 2, .normalize = normalize};
    cfg.out              = d / "out.tsv";
    cfg.format           = format;
    return cfg;
}

} // namespace

TEST(WriteMatrix, DenseRaw)
{
    TempDir d;
    auto    k = compute_kernel(fig2_corpus(), {.g = 3, .k = 2}).kernel;
    write_matrix(k, MatrixFormat::dense_tsv, d / "m.tsv");
    EXPECT_EQ(slurp(d / "m.tsv"), "S\tT\n15\t9\n9\t13\n");
}

TEST(WriteMatrix, DenseNormalizedUsesSixDigits)
{
    TempDir d;
    auto    k = compute_kernel(fig2_corpus(), {.g = 3, .k = 2, .normalize = true}).kernel;
    write_matrix(k, MatrixFormat::dense_tsv, d / "m.tsv");
    EXPECT_EQ(slurp(d / "m.tsv"), "S\tT\n1.000000\t0.644503\n0.644503\t1.000000\n");
}

TEST(WriteMatrix, SingleCell)
{
    TempDir d;
    auto    k = compute_kernel(test_support::corpus_of({"ACACA"}, "ACGT"), {.g = 3, .k = 2}).kernel;
    write_matrix(k, MatrixFormat::dense_tsv, d / "m.tsv");
    EXPECT_EQ(slurp(d / "m.tsv"), "s0\n15\n");
}

TEST(WriteMatrix, PrecomputedSvm)
{
    TempDir d;
    auto    k = compute_kernel(fig2_corpus(), {.g = 3, .k = 2, .normalize = true}).kernel;
    write_matrix(k, MatrixFormat::precomputed_svm, d / "m.svm");
    EXPECT_EQ(slurp(d / "m.svm"), "1 0:1 1:1.000000 2:0.644503\n0 0:2 1:0.644503 2:1.000000\n");

    k.labels = {std::nullopt, 7};
    k.normalized.reset();
    write_matrix(k, MatrixFormat::precomputed_svm, d / "raw.svm");
    EXPECT_EQ(slurp(d / "raw.svm"), "0 0:1 1:15 2:9\n7 0:2 1:9 2:13\n");
}

TEST(WriteMatrix, ReportIsJson)
{
    TempDir d;
    auto    r = compute_kernel(fig2_corpus(), {.g = 3, .k = 2, .normalize = true});
    write_matrix(r.kernel, MatrixFormat::report, d / "r.json", {&r.timing, 1});
    auto doc = nlohmann::json::parse(slurp(d / "r.json"));
    EXPECT_EQ(doc["params"]["g"], 3);
    EXPECT_EQ(doc["raw"][0][1], 9);
    EXPECT_EQ(doc["normalized"][0][1], "0.644503");
    EXPECT_EQ(doc["train_test_boundary"], 1);
    EXPECT_EQ(doc["stats"]["u"], 4);
    EXPECT_EQ(doc["labels"][0], 1);
}

TEST(WriteMatrix, UnwritablePathThrows)
{
    auto k = compute_kernel(fig2_corpus(), {.g = 3, .k = 2}).kernel;
    EXPECT_THROW(write_matrix(k, MatrixFormat::dense_tsv, "/nonexistent-dir/x/m.tsv"), Error);
}

TEST(FormatFixed6, Rendering)
{
    EXPECT_EQ(format_fixed6(9.0 / std::sqrt(195.0)), "0.644503");
    EXPECT_EQ(format_fixed6(1.0), "1.000000");
    EXPECT_EQ(format_fixed6(0.0), "0.000000");
    EXPECT_EQ(format_fixed6(0.25), "0.250000");
    EXPECT_EQ(format_fixed6(2.5e-7), "0.000000");
}

TEST(DenseTsv, RoundTripProperty)
{
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 20; ++trial) {
        auto c = test_support::random_corpus(rng, 1 + rng() % 10, 1, 40, 4);
        auto r = compute_kernel(c, {.g = 4, .k = 2, .normalize = trial % 2 == 0});

        std::stringstream ss;
        write_dense_tsv(r.kernel, ss);
        auto back = read_dense_tsv(ss);
        EXPECT_EQ(back.ids, r.kernel.sequence_ids);
        if (r.kernel.normalized) {
            auto m = back.reals();
            for (std::size_t i = 0; i < m.size(); ++i)
                for (std::size_t j = 0; j < m.size(); ++j)
                    EXPECT_EQ(format_fixed6(m(i, j)), format_fixed6((*r.kernel.normalized)(i, j)));
        } else {
            EXPECT_EQ(back.counts(), r.kernel.raw);
        }
    }
    std::stringstream bad("a\tb\n1\t2\n");
    EXPECT_THROW(read_dense_tsv(bad), ParseError);
}

TEST(RunKernel, WritesMatrixAndSidecar)
{
    TempDir d;
    auto    cfg = kernel_job(d, false);
    std::ostringstream log;
    ASSERT_EQ(run_kernel(cfg, log), 0) << log.str();
    EXPECT_EQ(slurp(d / "out.tsv"), "S\tT\n15\t9\n9\t13\n");
    auto timing = slurp(d / "out.tsv.timing.txt");
    EXPECT_NE(timing.find("cumulative[1]: "), std::string::npos);
    EXPECT_NE(timing.find("u: 4"), std::string::npos);
}

TEST(RunKernel, NormalizedDiagonalIsOne)
{
    TempDir d;
    auto    cfg = kernel_job(d, true);
    ASSERT_EQ(run_kernel(cfg), 0);
    auto table = read_dense_tsv(d / "out.tsv");
    EXPECT_EQ(table.cells[0][0], "1.000000");
    EXPECT_EQ(table.cells[1][1], "1.000000");
}

TEST(RunKernel, MissingInputCreatesNoOutput)
{
    TempDir d;
    auto    cfg = kernel_job(d, false);
    cfg.train   = d / "missing.fa";
    std::ostringstream log;
    EXPECT_NE(run_kernel(cfg, log), 0);
    EXPECT_FALSE(std::filesystem::exists(d / "out.tsv"));
    EXPECT_NE(log.str().find("does not exist"), std::string::npos);
}

TEST(RunKernel, InvalidParamsFailBeforeComputing)
{
    TempDir d;
    auto    cfg = kernel_job(d, false);
    cfg.params.k = 4;
    std::ostringstream log;
    EXPECT_EQ(run_kernel(cfg, log), 2);
    EXPECT_FALSE(std::filesystem::exists(d / "out.tsv"));
}

TEST(RunKernel, TrainAndTestAreConcatenated)
{
    TempDir d;
    auto    cfg = kernel_job(d, false, MatrixFormat::report);
    cfg.train   = d.write("train.fa", ">S\nACACA\n");
    cfg.test    = d.write("test.fa", ">T\nAAACA\n");
    cfg.out     = d / "r.json";
    ASSERT_EQ(run_kernel(cfg), 0);
    auto doc = nlohmann::json::parse(slurp(d / "r.json"));
    EXPECT_EQ(doc["train_test_boundary"], 1);
    EXPECT_EQ(doc["raw"][0][1], 9);
    EXPECT_NE(slurp(d / "r.json.timing.txt").find("train_test_boundary: 1"), std::string::npos);
}

TEST(RunKernel, LabeledTextInput)
{
    TempDir d;
    JobConfig cfg;
    cfg.train        = d.write("t.txt", "1\tab ab\n0\tba\n");
    cfg.input_format = InputFormat::text;
    cfg.params       = {.g = 2, .k = 1};
    cfg.out          = d / "t.svm";
    cfg.format       = MatrixFormat::precomputed_svm;
    ASSERT_EQ(run_kernel(cfg), 0);
    auto text = slurp(d / "t.svm");
    EXPECT_EQ(text.substr(0, 6), "1 0:1 ");
    EXPECT_NE(text.find("\n0 0:2 "), std::string::npos);
}

TEST(RunKernel, OutputIsDeterministic)
{
    TempDir d;
    auto    cfg = kernel_job(d, true);
    cfg.train   = d.write("big.fa", [] {
        std::string s;
        std::mt19937_64 rng(5);
        for (int i = 0; i < 30; ++i) {
            s += ">r" + std::to_string(i) + "\n";
            for (int j = 0; j < 60; ++j)
                s += "ACGT"[rng() % 4];
            s += "\n";
        }
        return s;
    }());
    cfg.params = {.g = 6, .k = 3, .normalize = true, .threads = 1};
    ASSERT_EQ(run_kernel(cfg), 0);
    auto first = slurp(d / "out.tsv");
    cfg.params.threads = 4;
    ASSERT_EQ(run_kernel(cfg), 0);
    EXPECT_EQ(slurp(d / "out.tsv"), first);
}

TEST(Generator, ReproducibleAndWithinAlphabet)
{
    bench::GeneratorSpec spec{.n_sequences = 12, .length = 50, .sigma = 20, .seed = 99};
    auto                 a = bench::generate_corpus(spec);
    EXPECT_EQ(a, bench::generate_corpus(spec));
    EXPECT_EQ(a.alphabet.size(), 20u);
    EXPECT_EQ(a.n_sequences(), 12u);
    for (const auto& r : a.records) {
        EXPECT_EQ(r.length(), 50u);
        for (auto code : r.codes)
            EXPECT_LT(code, 20u);
    }
    spec.seed = 100;
    EXPECT_NE(a, bench::generate_corpus(spec));
    EXPECT_THROW(bench::generate_corpus({.sigma = 0}), InvalidArgument);
    EXPECT_THROW(bench::generate_corpus({.sigma = 37}), InvalidArgument);
}

TEST(Generator, SkewConcentratesOnLowRanks)
{
    auto count_rank0 = [](double skew) {
        auto c = bench::generate_corpus({.n_sequences = 20, .length = 200, .sigma = 20, .seed = 3, .skew = skew});
        std::size_t n = 0;
        for (const auto& r : c.records)
            n += std::count(r.codes.begin(), r.codes.end(), symbol_t{0});
        return n;
    };
    EXPECT_GT(count_rank0(1.5), 3 * count_rank0(0.0));
}

TEST(Bench, PointAgreesAndReportsStats)
{
    auto c   = bench::generate_corpus({.n_sequences = 30, .length = 40, .sigma = 4, .seed = 1});
    auto row = bench::run_point(c, {.g = 5, .k = 3}, 3);
    EXPECT_TRUE(row.agreement);
    EXPECT_EQ(row.max_mismatch, 2u);
    EXPECT_GT(row.u, 0u);
    EXPECT_LE(row.eta, row.u);
    EXPECT_GT(row.gakco_single, 0.0);
    EXPECT_GT(row.trie, 0.0);
}

TEST(Bench, KSweepCoversEveryK)
{
    auto rows = bench::run_bench({.n_sequences = 10, .length = 30, .sigma = 20, .seed = 2}, {.g = 5, .k = 1},
                                 bench::Sweep::k, 2);
    ASSERT_EQ(rows.size(), 4u);
    for (unsigned i = 0; i < rows.size(); ++i) {
        EXPECT_EQ(rows[i].k, i + 1);
        EXPECT_TRUE(rows[i].agreement);
    }
    std::ostringstream out;
    bench::write_rows(rows, out);
    const auto text = out.str();
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 5);
}

TEST(Jobs, EstimateFromCorpus)
{
    TempDir   d;
    JobConfig cfg;
    cfg.command  = Command::estimate;
    cfg.train    = d.write("in.fa", fig2_fasta);
    cfg.alphabet = "ACGT";
    cfg.params   = {.g = 3, .k = 2};
    std::ostringstream out;
    ASSERT_EQ(run_estimate(cfg, out), 0);
    // u = 4 distinct 3-mers; M=1: 1 + 3*3 = 10 > 4
    EXPECT_NE(out.str().find("u: 4"), std::string::npos);
    EXPECT_NE(out.str().find("M=1 c_gk: 4 combinatorial: 10 eta: 4 clamp_binds"), std::string::npos);
}

TEST(Jobs, Selftest)
{
    std::ostringstream out;
    EXPECT_EQ(run_selftest(out, 20), 0) << out.str();
    EXPECT_EQ(out.str().find("FAIL"), std::string::npos);
}
