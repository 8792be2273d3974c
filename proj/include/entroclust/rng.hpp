#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "entroclust/errors.hpp"

namespace entroclust {

using Rng = std::mt19937_64;

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace detail

// Deterministically derives a component sub-seed from the run seed, so one
// seed flag reproduces a whole experiment while components stay decoupled.
inline std::uint64_t derive_seed(std::uint64_t base, const std::string& tag,
                                 std::uint64_t salt = 0) {
  return detail::splitmix64(base ^ detail::splitmix64(detail::fnv1a(tag) + salt));
}

// Unbiased draw from [0, n) using rejection sampling. Distribution classes
// from <random> are avoided on purpose: their output is implementation
// defined and would make artifacts non-reproducible across toolchains.
inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  if (n == 0) throw ArgumentError("uniform_index: empty range");
  std::uint64_t limit = ~0ULL - (~0ULL % n);
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return static_cast<std::size_t>(x % n);
}

// Uniform double in [0, 1) with 53 random bits.
inline double uniform_unit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Draws an index with probability proportional to its non-negative weight.
// The caller must ensure the total weight is positive.
inline std::size_t weighted_index(Rng& rng, const std::vector<double>& weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  if (!(total > 0.0)) throw ArgumentError("weighted_index: total weight must be positive");
  double u = uniform_unit(rng) * total;
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    if (u < acc) return i;
  }
  // Rounding pushed u past the last accumulator step; take the last positive.
  for (std::size_t i = weights.size(); i-- > 0;) {
    if (weights[i] > 0.0) return i;
  }
  return weights.size() - 1;
}

// k distinct indices from [0, n), drawn uniformly without replacement, in
// draw order.
inline std::vector<std::size_t> sample_without_replacement(Rng& rng, std::size_t n,
                                                           std::size_t k) {
  if (k > n) throw ArgumentError("sample_without_replacement: k exceeds population");
  std::vector<std::size_t> pool(n);
  for (std::size_t i = 0; i < n; ++i) pool[i] = i;
  std::vector<std::size_t> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t j = uniform_index(rng, pool.size());
    out.push_back(pool[j]);
    pool[j] = pool.back();
    pool.pop_back();
  }
  return out;
}

}  // namespace entroclust
