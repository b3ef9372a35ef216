#pragma once

// Counter-based randomness: every draw is a pure function of a seed and a
// tuple of counters, so results do not depend on iteration or thread order.

#include <cstdint>

namespace sbmsdp {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t mix_seed(std::uint64_t seed) { return mix64(seed); }

template <typename... Rest>
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t next, Rest... rest) {
  return mix_seed(mix64(seed) ^ next, static_cast<std::uint64_t>(rest)...);
}

/// Top 53 bits mapped to [0, 1).
constexpr double to_unit_interval(std::uint64_t h) {
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

}  // namespace sbmsdp
