#pragma once

#include <cstdint>
#include <random>

namespace dsq {

// All generated suites are reproducible from a caller-supplied seed.
// mt19937_64 is specified bit-for-bit by the standard, so frozen expected
// values stay valid across platforms.
using Prng = std::mt19937_64;

inline constexpr std::uint64_t kDefaultSeed = 0x00c0ffee5eed1234ull;

inline std::uint64_t rand_below(Prng& rng, std::uint64_t n) {
  return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(rng);
}

}  // namespace dsq
