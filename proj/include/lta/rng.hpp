#pragma once

#include <cstdint>

namespace lta {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed for an independent sub-stream, e.g. one per episode.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return mix64(seed ^ mix64(stream + 0x9e3779b97f4a7c15ULL));
}

/// 64-bit counter-based generator.
///
/// Draw i (1-based) is mix64(key + i * 0x9e3779b97f4a7c15), i.e. the
/// SplitMix64 sequence. Integer and uniform outputs use only 64-bit integer
/// arithmetic and one exact int->double conversion, so they are
/// bit-identical on every platform. normal() goes through libm (log, sqrt,
/// cos) and is reproducible only as far as the platform libm is.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}

  std::uint64_t next_u64() {
    ++counter_;
    return mix64(key_ + counter_ * 0x9e3779b97f4a7c15ULL);
  }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, bound), unbiased (rejection sampling).
  std::uint64_t below(std::uint64_t bound);

  /// Standard normal via Box-Muller; consumes exactly two draws.
  double normal();

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace lta
