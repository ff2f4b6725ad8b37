#pragma once

#include <cstdint>
#include <random>

namespace stabsens {

/// Deterministic uniform generator.
///
/// std::mt19937_64 has a standardized output sequence, but the standard
/// distributions do not, so the mapping to doubles is done by hand here.
/// Identical seeds therefore give identical samples on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [lo, hi] inclusive (rejection sampling).
  int uniform_int(int lo, int hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    std::uint64_t v;
    do {
      v = gen_();
    } while (v >= limit);
    return lo + static_cast<int>(v % span);
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace stabsens
