#pragma once

#include <cstdint>

namespace dynareg {

/// SplitMix64 (Steele, Lea, Flood 2014). The algorithm is part of the
/// reproducibility contract: sketches drawn from a given seed must not change
/// between releases. One 64-bit word of state; split() derives an
/// independent child stream.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed = 0) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform integer in [0, bound), Lemire's multiply-shift with rejection.
  std::uint64_t uniform_below(std::uint64_t bound) {
    __uint128_t product = static_cast<__uint128_t>(next()) * bound;
    auto low = static_cast<std::uint64_t>(product);
    if (low < bound) {
      const std::uint64_t threshold = -bound % bound;
      while (low < threshold) {
        product = static_cast<__uint128_t>(next()) * bound;
        low = static_cast<std::uint64_t>(product);
      }
    }
    return static_cast<std::uint64_t>(product >> 64);
  }

  /// +1 or -1 with equal probability, from the top bit.
  int sign() { return (next() >> 63) ? -1 : 1; }

  SplitMix64 split() { return SplitMix64(next()); }

  std::uint64_t state() const { return state_; }
  void set_state(std::uint64_t s) { state_ = s; }

 private:
  std::uint64_t state_;
};

}  // namespace dynareg
