#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace lpnorm {

inline std::uint64_t hash_mix(std::uint64_t h, std::uint64_t v) {
  // splitmix64 finalizer over a running hash
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  std::uint64_t z = h;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Deterministic sub-seed for a keyed task (instance index, module tag, ...).
inline std::uint64_t subseed(std::uint64_t base, std::uint64_t k1, std::uint64_t k2 = 0,
                             std::uint64_t k3 = 0) {
  std::uint64_t h = hash_mix(0x8a5cd789635d2dffULL, base);
  h = hash_mix(h, k1);
  h = hash_mix(h, k2);
  return hash_mix(h, k3);
}

/// Deterministic random source. All distributions are implemented on top of
/// the (standardized) mt19937_64 stream so that identical seeds produce
/// bit-identical draws on every platform; std:: distribution adaptors are
/// avoided because their sequences are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 bits of randomness.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in {0, 1, ..., n-1} by rejection (unbiased).
  std::uint64_t uniform_index(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v;
    do {
      v = engine_();
    } while (v >= limit);
    return v % n;
  }

  /// Random sign, +1 or -1.
  double sign() { return (engine_() & 1u) ? 1.0 : -1.0; }

  /// Standard normal via Box-Muller (fresh pair each call, no cache).
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
  }

  /// Gamma(shape, 1) via Marsaglia-Tsang, boosted for shape < 1.
  double gamma(double shape) {
    if (shape < 1.0) {
      const double u = uniform();
      return gamma(shape + 1.0) * std::pow(u > 0.0 ? u : 0x1.0p-53, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  /// Derives an independent deterministic stream keyed by `tag`.
  Rng fork(std::uint64_t tag) const { return Rng(subseed(seed_, tag)); }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace lpnorm
