#pragma once

#include <cstdint>

namespace mdlite {

/// SplitMix64 (Steele, Lea, Flood 2014). The constants are part of the
/// reproducibility contract: regression subsets and seeded velocities must
/// be identical in any implementation.
class SplitMix64 {
 public:
  static constexpr std::uint64_t golden_gamma = 0x9E3779B97F4A7C15ULL;
  static constexpr std::uint64_t mix1 = 0xBF58476D1CE4E5B9ULL;
  static constexpr std::uint64_t mix2 = 0x94D049BB133111EBULL;

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += golden_gamma);
    z = (z ^ (z >> 30)) * mix1;
    z = (z ^ (z >> 27)) * mix2;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1) from the top 53 bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// `next() % bound`; bound must be > 0.
  std::uint64_t below(std::uint64_t bound) { return next() % bound; }

 private:
  std::uint64_t state_;
};

}  // namespace mdlite
