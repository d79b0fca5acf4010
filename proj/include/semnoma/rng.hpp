#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace semnoma {

// Deterministic random stream. All randomness in the project flows through
// this wrapper: mt19937_64 is fully specified by the standard and the
// uniform/normal conversions below avoid the implementation-defined
// std::*_distribution classes, so a seed reproduces bit-identical streams
// across compilers.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [lo, hi] inclusive.
  int uniform_int(int lo, int hi) {
    const double u = uniform();
    int v = lo + static_cast<int>(u * (static_cast<double>(hi) - lo + 1.0));
    return v > hi ? hi : v;
  }

  bool bernoulli(double p) { return uniform() < p; }

  /// Standard normal via Box-Muller (pairs cached).
  double normal() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    cached_ = r * std::sin(a);
    has_cached_ = true;
    return r * std::cos(a);
  }

  /// Circularly-symmetric complex Gaussian with unit total variance.
  std::complex<double> cnormal() {
    const double re = normal();
    const double im = normal();
    return {re * M_SQRT1_2, im * M_SQRT1_2};
  }

  /// Independent child stream; splitmix64 keeps streams decorrelated.
  Rng split(std::uint64_t stream) {
    std::uint64_t z = engine_() + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return Rng(z ^ (z >> 31));
  }

 private:
  std::mt19937_64 engine_;
  bool has_cached_ = false;
  double cached_ = 0.0;
};

}  // namespace semnoma
