#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace hfm::nn {

/// Seedable generator with results fixed across platforms.
///
/// Engine: std::mt19937_64 (its output sequence is pinned by the C++
/// standard). The distribution helpers are implemented here rather than via
/// <random> distributions, whose algorithms vary between standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal via Box-Muller (cosine branch only).
  double normal();

 private:
  std::mt19937_64 engine_;
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// FNV-1a 64-bit over bytes, chained from `basis`.
std::uint64_t fnv1a64(std::string_view bytes,
                      std::uint64_t basis = 0xcbf29ce484222325ULL) noexcept;

}  // namespace hfm::nn
