#pragma once

#include <cstdint>
#include <random>

namespace liclab {

/// Deterministic RNG threaded explicitly through every stochastic op.
/// Distributions are hand-rolled on top of mt19937 draws so that a fixed
/// seed gives the same stream on every platform/standard library.
struct Rng {
  explicit Rng(std::uint64_t seed) : gen(static_cast<std::uint32_t>(seed)) {}

  std::uint32_t next_u32() { return gen(); }

  /// Uniform in [lo, hi) with 24 bits of resolution.
  float uniform(float lo, float hi) {
    float u = static_cast<float>(next_u32() >> 8) * (1.0f / 16777216.0f);
    return lo + (hi - lo) * u;
  }

  /// Uniform integer in [lo, hi] inclusive.
  int uniform_int(int lo, int hi) {
    std::uint32_t span = static_cast<std::uint32_t>(hi - lo) + 1u;
    return lo + static_cast<int>(next_u32() % span);
  }

  std::mt19937 gen;
};

}  // namespace liclab
