#pragma once

#include <cstdint>
#include <limits>
#include <optional>

#include "gakco/error.hpp"

namespace gakco {

using count_t = std::uint64_t;

namespace checked {

inline count_t add(count_t a, count_t b)
{
    count_t r;
    if (__builtin_add_overflow(a, b, &r))
        throw OverflowError("64-bit count overflow in addition");
    return r;
}

inline count_t mul(count_t a, count_t b)
{
    count_t r;
    if (__builtin_mul_overflow(a, b, &r))
        throw OverflowError("64-bit count overflow in multiplication");
    return r;
}

} // namespace checked

// Exact C(n, r); nullopt when the value does not fit below 2^63.
inline std::optional<count_t> try_binomial(unsigned n, unsigned r)
{
    if (r > n)
        return count_t{0};
    if (r > n - r)
        r = n - r;
    // Multiplicative form keeps every partial result an exact binomial C(n-r+i, i).
    unsigned __int128 acc = 1;
    for (unsigned i = 1; i <= r; ++i) {
        acc = acc * (n - r + i) / i;
        if (acc > static_cast<unsigned __int128>(std::numeric_limits<std::int64_t>::max()))
            return std::nullopt;
    }
    return static_cast<count_t>(acc);
}

inline count_t binomial(unsigned n, unsigned r)
{
    auto v = try_binomial(n, r);
    if (!v)
        throw OverflowError("binomial coefficient C(" + std::to_string(n) + "," + std::to_string(r) +
                            ") exceeds 2^63");
    return *v;
}

} // namespace gakco
