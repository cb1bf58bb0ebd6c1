#pragma once

// Small deterministic RNG (splitmix64) so generated instances and sampled
// probes are byte-identical across platforms and standard-library versions.

#include <cstdint>

#include "liespec/types.hpp"

namespace liespec::rng {

class SplitMix {
 public:
  explicit SplitMix(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1)
  double uniform() { return double(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  Complex cbox(double r) { return Complex(uniform(-r, r), uniform(-r, r)); }

  // roughly uniform on the unit circle without trig-table drift concerns
  Complex cdir() {
    for (;;) {
      const Complex z = cbox(1.0);
      const double a = std::abs(z);
      if (a > 1e-3 && a <= 1.0) return z / a;
    }
  }

  Index pick(Index n) { return Index(next() % std::uint64_t(n)); }

 private:
  std::uint64_t state_;
};

}  // namespace liespec::rng
