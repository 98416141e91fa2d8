#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace erslp {

/// SplitMix64 finalizer.
[[nodiscard]] constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Counter-based seed derivation: the stream for (seed, k1, k2, ...) depends only on
/// its keys, never on how many other streams were created before it.
[[nodiscard]] constexpr std::uint64_t derive_seed(std::uint64_t seed,
                                                  std::initializer_list<std::uint64_t> keys) noexcept {
    std::uint64_t h = mix64(seed);
    for (std::uint64_t k : keys) h = mix64(h ^ mix64(k + 0x632BE59BD9B4E019ULL));
    return h;
}

using Rng = std::mt19937_64;

[[nodiscard]] inline Rng make_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) {
    return Rng(derive_seed(seed, keys));
}

// Domain tags keep independent streams apart when they share numeric keys.
namespace stream {
inline constexpr std::uint64_t subspace = 0x5AB5;
inline constexpr std::uint64_t bootstrap = 0xB007;
inline constexpr std::uint64_t synthetic = 0x5E7D;
inline constexpr std::uint64_t montecarlo = 0x3C3C;
}  // namespace stream

}  // namespace erslp
