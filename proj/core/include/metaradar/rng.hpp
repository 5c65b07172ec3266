#pragma once

#include <cstdint>
#include <random>

#include "metaradar/types.hpp"

namespace metaradar {

/// SplitMix64 step; used to derive independent per-run streams from a
/// master seed so parallel runs stay reproducible.
inline std::uint64_t split_mix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) {
  std::uint64_t state = master ^ (a * 0x9e3779b97f4a7c15ULL) ^ (b * 0xd1b54a32d192ed03ULL);
  split_mix64(state);
  return split_mix64(state);
}

/// Uniform in [0, 1) from explicit bit manipulation; keeps sampled
/// sequences identical across standard-library implementations.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform_angle(std::mt19937_64& rng) { return kTwoPi * uniform01(rng); }

/// Standard real normal via Box-Muller.
inline double standard_normal(std::mt19937_64& rng) {
  double u1 = uniform01(rng);
  while (u1 <= 0.0) u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

/// Circularly symmetric complex normal with E|z|^2 = variance.
inline cdouble complex_normal(std::mt19937_64& rng, double variance = 1.0) {
  const double s = std::sqrt(variance / 2.0);
  return {s * standard_normal(rng), s * standard_normal(rng)};
}

}  // namespace metaradar
