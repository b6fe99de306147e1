#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace boldcal {

/// SplitMix64 finalizer (Steele, Lea & Flood 2014).
constexpr std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based stream: draw i is splitmix64_mix(key + (i + 1) * golden).
/// Any draw is addressable directly and streams derived from distinct keys
/// are independent for practical purposes, so substreams never shift when
/// unrelated streams are added.
class CounterStream {
 public:
  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

  explicit constexpr CounterStream(std::uint64_t key) noexcept : key_(key) {}

  /// Key for a named substream, folded from a list of identifiers.
  static constexpr std::uint64_t derive(std::uint64_t seed,
                                        std::initializer_list<std::uint64_t> ids) noexcept {
    std::uint64_t key = splitmix64_mix(seed ^ 0x6a09e667f3bcc909ULL);
    for (auto id : ids) key = splitmix64_mix(key ^ splitmix64_mix(id + kGolden));
    return key;
  }

  constexpr std::uint64_t bits(std::uint64_t index) const noexcept {
    return splitmix64_mix(key_ + (index + 1) * kGolden);
  }

  /// Uniform draw strictly inside (0, 1) with 53 random bits.
  constexpr double uniform(std::uint64_t index) const noexcept {
    return (double(bits(index) >> 11) + 0.5) * 0x1.0p-53;
  }

  std::uint64_t key() const noexcept { return key_; }

 private:
  std::uint64_t key_;
};

/// Standard normal quantile: Acklam's rational approximation refined by one
/// Halley step against erfc, accurate to about 1e-15 on (0, 1).
inline double normal_quantile(double p) {
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  if (p <= 0.0) return -INFINITY;
  if (p >= 1.0) return INFINITY;

  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

  const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
  const double u = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

}  // namespace boldcal
