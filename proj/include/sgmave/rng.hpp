#pragma once

#include <cstdint>
#include <random>

namespace sgmave {

// splitmix64 finalizer (Steele, Lea & Flood / Vigna). Used to derive one
// independent 64-bit stream seed per replication so that replication r of
// a run is reproducible regardless of execution order:
//   stream_seed(seed, r) = splitmix64(seed + (r + 1) * golden_gamma)
// The per-replication generator is the standard mt19937_64 seeded with
// that value; draws use std::normal_distribution in a documented order
// (predictors row by row, then the noise vector). Cross-language ports
// are expected to match statistically, not bitwise.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t replication) {
  return splitmix64(seed + (replication + 1) * 0x9E3779B97F4A7C15ULL);
}

inline std::mt19937_64 replication_stream(std::uint64_t seed,
                                          std::uint64_t replication) {
  return std::mt19937_64(stream_seed(seed, replication));
}

}  // namespace sgmave
