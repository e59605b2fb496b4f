#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>

namespace anyloss {

/// Binary label storage used throughout the library (values 0 or 1).
using Label = std::uint8_t;

namespace detail {

// Pairwise summation: the result only depends on the input order, never on
// thread scheduling, and the error grows as O(log n).
template <typename F>
double pairwise_sum(std::size_t begin, std::size_t end, const F& term) {
    constexpr std::size_t kBlock = 16;
    if (end - begin <= kBlock) {
        double s = 0.0;
        for (std::size_t i = begin; i < end; ++i) s += term(i);
        return s;
    }
    const std::size_t mid = begin + (end - begin) / 2;
    return pairwise_sum(begin, mid, term) + pairwise_sum(mid, end, term);
}

}  // namespace detail

template <typename F>
double pairwise_sum(std::size_t n, const F& term) {
    return n == 0 ? 0.0 : detail::pairwise_sum(0, n, term);
}

inline double pairwise_sum(std::span<const double> v) {
    return pairwise_sum(v.size(), [&](std::size_t i) { return v[i]; });
}

/// SplitMix64 finalizer; used to derive independent per-cell seeds from a base seed.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    return mix_seed(base ^ mix_seed(stream + 0x632be59bd9b4e019ULL));
}

template <typename... Ids>
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream, Ids... rest) {
    return derive_seed(derive_seed(base, stream), static_cast<std::uint64_t>(rest)...);
}

}  // namespace anyloss
