#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <span>

namespace kgnotable {

// splitmix64, used to derive independent seeds for sub-streams (per-label
// Monte Carlo runs, walk sampling) from one master seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  return splitmix64(base ^ splitmix64(stream + 0x4f1bbcdcbfa53e0aULL));
}

// Uniform double in [0,1) from the top 53 bits. std::mt19937_64 output is
// fully specified by the standard, so this is bit-stable across platforms,
// unlike std::uniform_real_distribution.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform index in [0, n). Modulo bias is < n / 2^64, irrelevant here.
inline std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
  return static_cast<std::size_t>(rng() % static_cast<std::uint64_t>(n));
}

// First index i with u < cum[i]; cum is a nondecreasing prefix-sum table
// whose last entry covers the whole mass.
inline std::size_t sample_cumulative(std::span<const double> cum, double u) {
  auto it = std::upper_bound(cum.begin(), cum.end(), u);
  if (it == cum.end()) it = cum.end() - 1;
  return static_cast<std::size_t>(it - cum.begin());
}

}  // namespace kgnotable
