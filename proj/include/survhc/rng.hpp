#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace survhc {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Seed for the task at `path` under `master`. Each path element is folded
/// in turn, so (m, a, b) and (m, b, a) give unrelated streams.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) noexcept {
    std::uint64_t h = mix64(master);
    for (auto k : path) h = mix64(h ^ mix64(k + 0x632be59bd9b4e019ULL));
    return h;
}

inline Rng make_rng(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
    return Rng(derive_seed(master, path));
}

/// Stream tags keep the null, cell and permutation draws apart under one master seed.
namespace stream {
inline constexpr std::uint64_t model_null = 0x6e756c6cULL;
inline constexpr std::uint64_t permutation = 0x7065726dULL;
inline constexpr std::uint64_t grid_cell = 0x63656c6cULL;
}  // namespace stream

}  // namespace survhc
