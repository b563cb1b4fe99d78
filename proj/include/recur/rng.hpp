#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "recur/errors.hpp"

namespace recur {

/// SplitMix64 step; used both as a stream deriver and as a small avalanche mixer.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Derives a well-separated stream key from (seed, replication, subject).
/// Guarantees identical draws for a given triple no matter which worker runs it.
inline std::uint64_t stream_key(std::uint64_t seed, std::uint64_t rep, std::uint64_t subject) {
  std::uint64_t s = seed;
  std::uint64_t a = splitmix64(s);
  s ^= rep * 0xd1342543de82ef95ULL;
  std::uint64_t b = splitmix64(s);
  s ^= subject * 0xaf251af3b0f025b5ULL;
  std::uint64_t c = splitmix64(s);
  return a ^ (b + 0x9e3779b97f4a7c15ULL) ^ (c << 1);
}

/// Deterministic random stream with explicit inverse-CDF samplers.
/// mt19937_64 is fully specified by the standard, so identical keys give
/// identical draws on every platform; all transformations below avoid
/// std::*_distribution whose algorithms are implementation-defined.
class RngStream {
 public:
  explicit RngStream(std::uint64_t key) : gen_(key) {}

  /// Uniform on [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1]; never returns exactly zero.
  double uniform_pos() {
    double u;
    do {
      u = 1.0 - uniform();
    } while (u <= 0.0);
    return u;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Weibull with survival S(t) = exp(-(t/scale)^shape).
  double weibull(double shape, double scale) {
    if (shape <= 0.0 || scale <= 0.0) throw ConfigError("weibull parameters must be positive");
    return scale * std::pow(-std::log(uniform_pos()), 1.0 / shape);
  }

  /// Exact Poisson sampler (multiplicative method); adequate for the mean
  /// ranges of the study design (< 50). Requires mean >= 0.
  long poisson(double mean) {
    if (!(mean >= 0.0)) throw ConfigError("poisson mean must be nonnegative");
    if (mean == 0.0) return 0;
    const double limit = std::exp(-mean);
    long k = 0;
    double prod = uniform_pos();
    while (prod > limit) {
      ++k;
      prod *= uniform_pos();
    }
    return k;
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace recur
