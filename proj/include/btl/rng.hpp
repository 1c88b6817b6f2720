#pragma once

#include <cstdint>

namespace btl {

// Counter-based pseudorandom stream (splitmix64 finalizer over seed+counter).
// Stateless: value i of a stream is a pure function of (seed, i), so batches
// and threads can consume disjoint counter ranges with identical results
// regardless of scheduling.
inline std::uint64_t mix64(std::uint64_t seed, std::uint64_t counter) {
  std::uint64_t z = seed + counter * 0x9E3779B97F4A7C15ULL + 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Uniform double strictly inside (0, 1).
inline double uniform01(std::uint64_t seed, std::uint64_t counter) {
  return (static_cast<double>(mix64(seed, counter) >> 11) + 0.5) * 0x1.0p-53;
}

// Uniform double in [a, b].
inline double uniform_in(std::uint64_t seed, std::uint64_t counter, double a,
                         double b) {
  return a + (b - a) * uniform01(seed, counter);
}

}  // namespace btl
