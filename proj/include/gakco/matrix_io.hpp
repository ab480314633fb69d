#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "gakco/error.hpp"
#include "gakco/kernel_core.hpp"

namespace gakco {

enum class MatrixFormat
{
    dense_tsv,
    precomputed_svm,
    report,
};

// Fixed 6 fractional digits; to_chars rounds the exact binary value and
// settles exact ties to even, independent of locale and platform printf.
inline std::string format_fixed6(double v)
{
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 6);
    if (ec != std::errc{})
        throw Error("cannot format value");
    return std::string(buf, ptr);
}

// Cell (i, j) as written: normalized when available, else the raw count.
inline std::string format_cell(const KernelMatrix& k, std::size_t i, std::size_t j)
{
    if (k.normalized)
        return format_fixed6((*k.normalized)(i, j));
    return std::to_string(k.raw(i, j));
}

namespace detail {

inline std::ofstream open_output(const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw Error("cannot write output file: " + path.string());
    return out;
}

inline void finish(std::ofstream& out, const std::filesystem::path& path)
{
    out.flush();
    if (!out)
        throw Error("write failed: " + path.string());
}

} // namespace detail

inline void write_dense_tsv(const KernelMatrix& k, std::ostream& out)
{
    const std::size_t n = k.raw.size();
    for (std::size_t i = 0; i < n; ++i)
        out << (i ? "\t" : "") << k.sequence_ids[i];
    out << '\n';
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j)
            out << (j ? "\t" : "") << format_cell(k, i, j);
        out << '\n';
    }
}

// "<label> 0:<1-based index> 1:<K(i,1)> ... N:<K(i,N)>"
inline void write_precomputed_svm(const KernelMatrix& k, std::ostream& out)
{
    const std::size_t n = k.raw.size();
    for (std::size_t i = 0; i < n; ++i) {
        const long label = i < k.labels.size() && k.labels[i] ? *k.labels[i] : 0;
        out << label << " 0:" << (i + 1);
        for (std::size_t j = 0; j < n; ++j)
            out << ' ' << (j + 1) << ':' << format_cell(k, i, j);
        out << '\n';
    }
}

struct ReportContext
{
    const TimingReport*        timing         = nullptr;
    std::optional<std::size_t> train_boundary; // first test index
};

inline nlohmann::ordered_json kernel_report(const KernelMatrix& k, const ReportContext& ctx = {})
{
    using nlohmann::ordered_json;
    const std::size_t n = k.raw.size();

    ordered_json params = {{"g", k.params.g},
                           {"k", k.params.k},
                           {"max_mismatch", k.params.mismatch_cap()},
                           {"normalize", k.normalized.has_value()},
                           {"threads", k.params.threads},
                           {"two_level_parallel", k.params.two_level_parallel}};

    ordered_json labels = ordered_json::array();
    for (const auto& l : k.labels)
        labels.push_back(l ? ordered_json(*l) : ordered_json(nullptr));

    ordered_json raw = ordered_json::array();
    for (std::size_t i = 0; i < n; ++i) {
        ordered_json row = ordered_json::array();
        for (std::size_t j = 0; j < n; ++j)
            row.push_back(k.raw(i, j));
        raw.push_back(std::move(row));
    }

    ordered_json doc = {{"params", params}, {"n_sequences", n}, {"sequence_ids", k.sequence_ids}, {"labels", labels}};
    if (ctx.train_boundary)
        doc["train_test_boundary"] = *ctx.train_boundary;
    doc["raw"] = std::move(raw);
    if (k.normalized) {
        // strings keep the fixed 6-digit rendering bit-exact
        ordered_json norm = ordered_json::array();
        for (std::size_t i = 0; i < n; ++i) {
            ordered_json row = ordered_json::array();
            for (std::size_t j = 0; j < n; ++j)
                row.push_back(format_fixed6((*k.normalized)(i, j)));
            norm.push_back(std::move(row));
        }
        doc["normalized"] = std::move(norm);
    }
    if (ctx.timing)
        doc["stats"] = {{"u", ctx.timing->u},
                        {"z", ctx.timing->z},
                        {"total_gmers", ctx.timing->total_gmers},
                        {"peak_matrix_bytes", ctx.timing->peak_matrix_bytes}};
    return doc;
}

inline void write_matrix(const KernelMatrix& k, MatrixFormat format, const std::filesystem::path& path,
                         const ReportContext& ctx = {})
{
    auto out = detail::open_output(path);
    switch (format) {
    case MatrixFormat::dense_tsv: write_dense_tsv(k, out); break;
    case MatrixFormat::precomputed_svm: write_precomputed_svm(k, out); break;
    case MatrixFormat::report: out << kernel_report(k, ctx).dump(2) << '\n'; break;
    }
    detail::finish(out, path);
}

inline void write_timing(const TimingReport& timing, const std::filesystem::path& path,
                         std::optional<std::size_t> train_boundary = std::nullopt)
{
    auto out = detail::open_output(path);
    out << timing.to_text();
    if (train_boundary)
        out << "train_test_boundary: " << *train_boundary << '\n';
    detail::finish(out, path);
}

// Parsed dense_tsv file; cells are kept as written.
struct DenseTable
{
    std::vector<std::string>              ids;
    std::vector<std::vector<std::string>> cells;

    std::size_t size() const noexcept { return ids.size(); }

    CountMatrix counts() const
    {
        std::vector<count_t> dense;
        for (std::size_t i = 0; i < cells.size(); ++i)
            for (const auto& c : cells[i]) {
                count_t v{};
                auto [p, ec] = std::from_chars(c.data(), c.data() + c.size(), v);
                if (ec != std::errc{} || p != c.data() + c.size())
                    throw ParseError("not an integer cell '" + c + "'", i + 2);
                dense.push_back(v);
            }
        return CountMatrix::from_dense(size(), dense);
    }

    RealMatrix reals() const
    {
        std::vector<double> dense;
        for (std::size_t i = 0; i < cells.size(); ++i)
            for (const auto& c : cells[i]) {
                double v{};
                auto [p, ec] = std::from_chars(c.data(), c.data() + c.size(), v);
                if (ec != std::errc{} || p != c.data() + c.size())
                    throw ParseError("not a numeric cell '" + c + "'", i + 2);
                dense.push_back(v);
            }
        return RealMatrix::from_dense(size(), dense);
    }
};

inline std::vector<std::string> split_tabs(std::string_view line)
{
    std::vector<std::string> out;
    std::size_t              start = 0;
    while (true) {
        auto tab = line.find('\t', start);
        out.emplace_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
        if (tab == std::string_view::npos)
            break;
        start = tab + 1;
    }
    return out;
}

inline DenseTable read_dense_tsv(std::istream& in)
{
    DenseTable  t;
    std::string line;
    if (!std::getline(in, line))
        throw ParseError("empty dense matrix file");
    t.ids = split_tabs(line);
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty())
            continue;
        auto row = split_tabs(line);
        if (row.size() != t.ids.size())
            throw ParseError("row width does not match header", lineno);
        t.cells.push_back(std::move(row));
    }
    if (t.cells.size() != t.ids.size())
        throw ParseError("row count does not match header");
    return t;
}

inline DenseTable read_dense_tsv(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open matrix file: " + path.string());
    return read_dense_tsv(in);
}

} // namespace gakco
