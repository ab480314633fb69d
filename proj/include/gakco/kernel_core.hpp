#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "gakco/binomial.hpp"
#include "gakco/error.hpp"
#include "gakco/gmer_engine.hpp"
#include "gakco/sequence_io.hpp"
#include "gakco/symmetric_matrix.hpp"

namespace gakco {

struct KernelParams
{
    unsigned                g = 0;
    unsigned                k = 0;
    std::optional<unsigned> max_mismatch; // defaults to g - k
    bool                    normalize          = false;
    unsigned                threads            = 1;
    bool                    two_level_parallel = false;

    unsigned gaps() const noexcept { return g - k; }
    unsigned mismatch_cap() const noexcept { return max_mismatch.value_or(gaps()); }

    void validate() const
    {
        if (k < 1 || k > g)
            throw InvalidArgument("require 1 <= k <= g (got g=" + std::to_string(g) + ", k=" + std::to_string(k) + ")");
        if (max_mismatch && *max_mismatch > gaps())
            throw InvalidArgument("max mismatch must not exceed g - k");
        if (threads < 1)
            throw InvalidArgument("thread count must be at least 1");
        for (unsigned m = 0; m <= mismatch_cap(); ++m)
            if (!try_binomial(g, m))
                throw InvalidArgument("C(g, m) exceeds 2^63; g is too large");
    }
};

// h_m = C(g - m, k) for m = 0..g-k.
struct CoefficientTable
{
    std::vector<count_t> h;

    count_t operator[](std::size_t m) const { return m < h.size() ? h[m] : 0; }
};

inline CoefficientTable coefficients(unsigned g, unsigned k)
{
    if (k < 1 || k > g)
        throw InvalidArgument("require 1 <= k <= g");
    CoefficientTable t;
    for (unsigned m = 0; m <= g - k; ++m)
        t.h.push_back(binomial(g - m, k));
    return t;
}

struct ProfileStack
{
    std::vector<CountMatrix> cumulative; // C_0..C_M
    std::vector<CountMatrix> exact;      // N_0..N_M
    std::size_t              u = 0;      // unique g-mers
    std::size_t              z = 0;      // unique g-mers occurring more than once
    // groups_per_set[m][p]: matching groups found for position set p at m mismatches
    std::vector<std::vector<std::size_t>> groups_per_set;
};

struct KernelMatrix
{
    CountMatrix                      raw;
    std::optional<RealMatrix>        normalized;
    KernelParams                     params;
    std::vector<std::string>         sequence_ids;
    std::vector<std::optional<long>> labels;
};

struct TimingReport
{
    std::vector<std::pair<std::string, double>> stages; // wall seconds
    std::size_t                                 u                 = 0;
    std::size_t                                 z                 = 0;
    std::size_t                                 total_gmers       = 0;
    std::size_t                                 peak_matrix_bytes = 0;

    double seconds(const std::string& stage) const
    {
        for (const auto& [name, s] : stages)
            if (name == stage)
                return s;
        return 0.0;
    }

    double kernel_seconds() const
    {
        double t = 0;
        for (const auto& [name, s] : stages)
            if (!name.starts_with("cumulative["))
                t += s;
        return t;
    }

    std::string to_text() const
    {
        std::string out;
        char        buf[64];
        for (const auto& [name, s] : stages) {
            std::snprintf(buf, sizeof buf, "%.3f", s);
            out += name + ": " + buf + "\n";
        }
        out += "u: " + std::to_string(u) + "\n";
        out += "z: " + std::to_string(z) + "\n";
        out += "total_gmers: " + std::to_string(total_gmers) + "\n";
        out += "peak_matrix_bytes: " + std::to_string(peak_matrix_bytes) + "\n";
        return out;
    }
};

struct KernelResult
{
    KernelMatrix kernel;
    ProfileStack profiles;
    TimingReport timing;
};

namespace detail {

using clock = std::chrono::steady_clock;

inline double seconds_since(clock::time_point t0)
{
    return std::chrono::duration<double>(clock::now() - t0).count();
}

// Sums sort-and-count updates for a run of position sets into target.
inline void accumulate_position_sets(const GMerTable& table, std::span<const PositionSet> sets, CountMatrix& target,
                                     std::span<std::size_t> group_counts, std::size_t* unique_keys = nullptr)
{
    for (std::size_t p = 0; p < sets.size(); ++p) {
        auto groups = sort_and_count(project(table, sets[p]));
        accumulate_groups(groups, target);
        group_counts[p] = groups.size();
        if (unique_keys)
            *unique_keys = groups.unique_keys();
    }
}

// Runs task(i) for i in [0, n) on up to `workers` threads; rethrows the first failure.
template<typename Task>
void run_tasks(std::size_t n, unsigned workers, Task&& task)
{
    workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, workers), n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i)
            task(i);
        return;
    }
    std::atomic<std::size_t>        next{0};
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread>        pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i; (i = next.fetch_add(1)) < n;)
                    task(i);
            } catch (...) {
                errors[w] = std::current_exception();
                next      = n;
            }
        });
    for (auto& t : pool)
        t.join();
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
}

// Contiguous chunk boundaries splitting `count` items into `parts` pieces.
inline std::vector<std::size_t> chunk_bounds(std::size_t count, std::size_t parts)
{
    parts = std::max<std::size_t>(1, std::min(parts, count));
    std::vector<std::size_t> b(parts + 1);
    for (std::size_t i = 0; i <= parts; ++i)
        b[i] = count * i / parts;
    return b;
}

} // namespace detail

// C_m: sum over all C(g, m) position sets of the sort-and-count outer products.
// With workers > 1 the position sets are split into private-matrix chunks.
inline CountMatrix cumulative_profile(const GMerTable& table, unsigned m, unsigned workers = 1)
{
    if (table.width == 0 || m >= table.width)
        throw InvalidArgument("require 0 <= m <= g - 1");
    const auto  sets   = enumerate_position_sets(table.width, m);
    const auto  bounds = detail::chunk_bounds(sets.size(), workers);
    const auto  chunks = bounds.size() - 1;
    std::vector<CountMatrix> partial(chunks, CountMatrix(table.n_sequences));
    std::vector<std::size_t> groups(sets.size());

    detail::run_tasks(chunks, workers, [&](std::size_t c) {
        std::span<const PositionSet> range(sets.data() + bounds[c], bounds[c + 1] - bounds[c]);
        detail::accumulate_position_sets(table, range,
                                         partial[c], std::span(groups).subspan(bounds[c], range.size()));
    });

    CountMatrix out = std::move(partial[0]);
    for (std::size_t c = 1; c < chunks; ++c)
        add_into(out, partial[c]);
    return out;
}

// N_m = C_m - sum_{j<m} C(g-j, m-j) N_j.
inline std::vector<CountMatrix> mismatch_from_cumulative(std::span<const CountMatrix> cumulative, unsigned g)
{
    std::vector<CountMatrix> exact;
    exact.reserve(cumulative.size());
    for (std::size_t m = 0; m < cumulative.size(); ++m) {
        CountMatrix nm = cumulative[m];
        if (m > 0 && m > g)
            throw InvalidArgument("more cumulative profiles than g allows");
        auto dst = nm.raw();
        for (std::size_t j = 0; j < m; ++j) {
            const count_t factor = binomial(g - static_cast<unsigned>(j), static_cast<unsigned>(m - j));
            auto          src    = exact[j].raw();
            if (src.size() != dst.size())
                throw InvalidArgument("profile size mismatch");
            for (std::size_t e = 0; e < dst.size(); ++e) {
                const count_t sub = checked::mul(factor, src[e]);
                if (sub > dst[e])
                    throw ConsistencyError("negative exact mismatch count at m=" + std::to_string(m) +
                                           "; cumulative profiles are inconsistent");
                dst[e] -= sub;
            }
        }
        exact.push_back(std::move(nm));
    }
    return exact;
}

// raw = sum_{m=0}^{min(cap, g-k)} N_m h_m.
inline CountMatrix assemble_kernel(std::span<const CountMatrix> exact, const CoefficientTable& coeffs,
                                   unsigned max_mismatch)
{
    if (exact.empty())
        throw InvalidArgument("no mismatch profiles to assemble");
    const std::size_t last = std::min<std::size_t>(max_mismatch, coeffs.h.size() - 1);
    if (last >= exact.size())
        throw InvalidArgument("mismatch profiles do not cover the requested cap");
    CountMatrix raw(exact[0].size());
    auto        dst = raw.raw();
    for (std::size_t m = 0; m <= last; ++m) {
        const count_t h   = coeffs[m];
        auto          src = exact[m].raw();
        for (std::size_t e = 0; e < dst.size(); ++e)
            dst[e] = checked::add(dst[e], checked::mul(src[e], h));
    }
    return raw;
}

// Cosine normalization; rows of sequences with a zero self-kernel are zero.
inline RealMatrix normalized_matrix(const CountMatrix& raw)
{
    const std::size_t   n = raw.size();
    RealMatrix          out(n);
    std::vector<double> root(n);
    for (std::size_t i = 0; i < n; ++i)
        root[i] = std::sqrt(static_cast<double>(raw(i, i)));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            if (raw(i, i) == 0 || raw(j, j) == 0)
                out(i, j) = 0.0;
            else if (i == j)
                out(i, j) = 1.0;
            else
                out(i, j) = static_cast<double>(raw(i, j)) / (root[i] * root[j]);
        }
    return out;
}

inline KernelMatrix normalize(KernelMatrix kernel)
{
    kernel.normalized = normalized_matrix(kernel.raw);
    return kernel;
}

// Full pipeline: extract g-mers, cumulative profiles per m (parallel over m,
// optionally over position sets as well), exact recovery, assembly.
inline KernelResult compute_kernel(const SequenceCorpus& corpus, const KernelParams& params)
{
    params.validate();
    if (corpus.n_sequences() == 0)
        throw InvalidArgument("corpus is empty");

    KernelResult result;
    auto&        timing = result.timing;
    auto&        prof   = result.profiles;

    auto       t0    = detail::clock::now();
    const auto table = extract_gmers(corpus, params.g);
    timing.stages.emplace_back("extract", detail::seconds_since(t0));
    timing.total_gmers = table.total();

    const unsigned    cap = params.mismatch_cap();
    const std::size_t n   = corpus.n_sequences();

    // Task list in fixed (m, chunk) order; merged in the same order.
    struct Task
    {
        unsigned    m;
        std::size_t chunk;
        std::size_t begin, end;
    };
    std::vector<std::vector<PositionSet>> sets(cap + 1);
    std::vector<std::vector<std::size_t>> bounds(cap + 1);
    std::vector<Task>                     tasks;
    for (unsigned m = 0; m <= cap; ++m) {
        sets[m]   = enumerate_position_sets(params.g, m);
        bounds[m] = detail::chunk_bounds(sets[m].size(), params.two_level_parallel ? params.threads : 1);
        for (std::size_t c = 0; c + 1 < bounds[m].size(); ++c)
            tasks.push_back({m, c, bounds[m][c], bounds[m][c + 1]});
    }
    // Larger m values carry more position sets; start them first.
    std::vector<std::size_t> order(tasks.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) {
                         return tasks[a].end - tasks[a].begin > tasks[b].end - tasks[b].begin;
                     });

    std::vector<CountMatrix>                 partial(tasks.size());
    std::vector<double>                      task_start(tasks.size()), task_end(tasks.size());
    std::size_t                              unique_keys = 0;
    prof.groups_per_set.resize(cap + 1);
    for (unsigned m = 0; m <= cap; ++m)
        prof.groups_per_set[m].assign(sets[m].size(), 0);

    const auto t_cum = detail::clock::now();
    detail::run_tasks(tasks.size(), params.threads, [&](std::size_t slot) {
        const auto& task = tasks[order[slot]];
        task_start[order[slot]] = detail::seconds_since(t_cum);
        CountMatrix mat(n);
        std::span<const PositionSet> range(sets[task.m].data() + task.begin, task.end - task.begin);
        detail::accumulate_position_sets(table, range, mat,
                                         std::span(prof.groups_per_set[task.m]).subspan(task.begin, range.size()),
                                         task.m == 0 ? &unique_keys : nullptr);
        partial[order[slot]]  = std::move(mat);
        task_end[order[slot]] = detail::seconds_since(t_cum);
    });

    prof.cumulative.assign(cap + 1, CountMatrix());
    std::vector<double> m_start(cap + 1, 1e300), m_end(cap + 1, 0.0);
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        const auto m = tasks[i].m;
        if (tasks[i].chunk == 0)
            prof.cumulative[m] = std::move(partial[i]);
        else
            add_into(prof.cumulative[m], partial[i]);
        m_start[m] = std::min(m_start[m], task_start[i]);
        m_end[m]   = std::max(m_end[m], task_end[i]);
    }
    timing.stages.emplace_back("cumulative", detail::seconds_since(t_cum));
    for (unsigned m = 0; m <= cap; ++m)
        timing.stages.emplace_back("cumulative[" + std::to_string(m) + "]", m_end[m] - m_start[m]);

    prof.u = unique_keys;
    prof.z = prof.groups_per_set[0].empty() ? 0 : prof.groups_per_set[0][0];

    t0         = detail::clock::now();
    prof.exact = mismatch_from_cumulative(prof.cumulative, params.g);
    timing.stages.emplace_back("recover", detail::seconds_since(t0));

    t0                     = detail::clock::now();
    auto& kernel           = result.kernel;
    kernel.raw             = assemble_kernel(prof.exact, coefficients(params.g, params.k), cap);
    kernel.params          = params;
    for (const auto& r : corpus.records) {
        kernel.sequence_ids.push_back(r.id);
        kernel.labels.push_back(r.label);
    }
    timing.stages.emplace_back("assemble", detail::seconds_since(t0));

    t0 = detail::clock::now();
    if (params.normalize)
        kernel.normalized = normalized_matrix(kernel.raw);
    timing.stages.emplace_back("normalize", detail::seconds_since(t0));

    timing.u = prof.u;
    timing.z = prof.z;
    // cumulative + exact stacks, kernel, plus private matrices alive at once
    const std::size_t cell = kernel.raw.stored_elements() * sizeof(count_t);
    const std::size_t live = std::min<std::size_t>(tasks.size(), params.threads);
    timing.peak_matrix_bytes = cell * (2 * (cap + 1) + 1 + (params.two_level_parallel ? live : 0)) +
                               (params.normalize ? kernel.raw.stored_elements() * sizeof(double) : 0);
    return result;
}

} // namespace gakco
