#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace tdfn {

/// Deterministic random source. The engine is std::mt19937_64, whose output
/// sequence is fixed by the standard; the value transforms below are written
/// out explicitly because the std:: distributions are implementation-defined
/// and would break the bit-for-bit reproducibility contract.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, n), n >= 1.
  std::uint64_t bounded(std::uint64_t n) {
    // Multiply-shift with rejection of the biased zone.
    while (true) {
      std::uint64_t x = engine_();
      __uint128_t m = static_cast<__uint128_t>(x) * n;
      auto lo = static_cast<std::uint64_t>(m);
      if (lo >= n || lo >= (-n) % n) return static_cast<std::uint64_t>(m >> 64);
    }
  }

  int uniform_int(int lo, int hi_inclusive) {
    return lo + static_cast<int>(bounded(static_cast<std::uint64_t>(hi_inclusive - lo) + 1));
  }

  /// Standard normal via Box-Muller, one spare cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1, u2;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace tdfn
