#pragma once

#include <cstdint>
#include <random>

namespace cvxtau {

/// Inverse of the standard normal CDF, accurate to a few ulps for p in (0, 1).
double normal_quantile(double p);

/// Two-sided Wilson score interval for a binomial proportion.
struct WilsonInterval {
  double lower;
  double upper;
};

WilsonInterval wilson_interval(std::int64_t successes, std::int64_t trials, double z);

/// z-score for a two-sided interval at the given confidence split across
/// `comparisons` Bonferroni-corrected tests.
double bonferroni_z(double confidence, int comparisons);

/// Seeded generator used everywhere randomness appears.
using Rng = std::mt19937_64;

/// Uniform draw in the open interval (0, 1) built from 53 random bits, so the
/// stream is identical across standard libraries.
inline double uniform_open(Rng& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

inline double uniform_in(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform_open(rng);
}

inline double standard_normal(Rng& rng) { return normal_quantile(uniform_open(rng)); }

}  // namespace cvxtau
