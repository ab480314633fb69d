#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "gakco/binomial.hpp"
#include "gakco/error.hpp"

namespace gakco {

// N x N symmetric matrix stored as the upper triangle (diagonal included), row-major.
// Access with i > j resolves to (j, i).
template<typename T>
class SymmetricMatrix
{
  public:
    using value_type = T;

    SymmetricMatrix() = default;
    explicit SymmetricMatrix(std::size_t n, T fill = T{})
      : n_(n)
      , data_(n * (n + 1) / 2, fill)
    {}

    std::size_t size() const noexcept { return n_; }
    std::size_t stored_elements() const noexcept { return data_.size(); }

    T&       operator()(std::size_t i, std::size_t j) noexcept { return data_[index(i, j)]; }
    const T& operator()(std::size_t i, std::size_t j) const noexcept { return data_[index(i, j)]; }

    std::span<T>       raw() noexcept { return data_; }
    std::span<const T> raw() const noexcept { return data_; }

    friend bool operator==(const SymmetricMatrix&, const SymmetricMatrix&) = default;

    // Build from a dense row-major matrix; throws if it is not exactly symmetric.
    static SymmetricMatrix from_dense(std::size_t n, std::span<const T> dense)
    {
        if (dense.size() != n * n)
            throw InvalidArgument("dense matrix has wrong element count");
        SymmetricMatrix out(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i; j < n; ++j) {
                if (dense[i * n + j] != dense[j * n + i])
                    throw ConsistencyError("dense matrix is not symmetric");
                out(i, j) = dense[i * n + j];
            }
        return out;
    }

    std::vector<T> to_dense() const
    {
        std::vector<T> out(n_ * n_);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j)
                out[i * n_ + j] = (*this)(i, j);
        return out;
    }

  private:
    std::size_t index(std::size_t i, std::size_t j) const noexcept
    {
        if (i > j)
            std::swap(i, j);
        // rows 0..i-1 hold n, n-1, ..., n-i+1 entries
        return i * n_ - (i * (i - 1)) / 2 + (j - i);
    }

    std::size_t    n_ = 0;
    std::vector<T> data_;
};

using CountMatrix = SymmetricMatrix<count_t>;
using RealMatrix  = SymmetricMatrix<double>;

// target += other, entrywise, with overflow checks.
inline void add_into(CountMatrix& target, const CountMatrix& other)
{
    if (target.size() != other.size())
        throw InvalidArgument("matrix size mismatch");
    auto t = target.raw();
    auto o = other.raw();
    for (std::size_t i = 0; i < t.size(); ++i)
        t[i] = checked::add(t[i], o[i]);
}

} // namespace gakco
