#pragma once

// Portable seeded generator. xoshiro256** state initialised with splitmix64;
// normal deviates by the Marsaglia polar method. The bit stream depends only
// on the seed, so noise vectors are reproducible across platforms that use
// IEEE-754 doubles with a correctly rounded sqrt and log.

#include <array>
#include <cstdint>

namespace dsm {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) noexcept;

  std::uint64_t next_u64() noexcept;

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() noexcept;

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  /// Standard normal deviate.
  double normal() noexcept;

 private:
  std::array<std::uint64_t, 4> s_{};
  double spare_ = 0.0;
  bool has_spare_ = false;
};

std::uint64_t splitmix64(std::uint64_t& state) noexcept;

}  // namespace dsm
