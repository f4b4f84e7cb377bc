#pragma once

#include <cmath>
#include <numbers>

namespace fairsmile {

inline constexpr double kInvSqrt2Pi = 0.3989422804014327;  // 1/sqrt(2 pi)
inline constexpr double kSqrtHalfPi = 1.2533141373155003;  // sqrt(pi/2)
inline constexpr double kSqrt2Pi = 2.5066282746310002;     // sqrt(2 pi)

[[nodiscard]] inline double norm_pdf(double x) noexcept {
  return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

[[nodiscard]] inline double norm_cdf(double x) noexcept {
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

// Upper tail 1 - N(x), accurate for large positive x.
[[nodiscard]] inline double norm_sf(double x) noexcept {
  return 0.5 * std::erfc(x / std::numbers::sqrt2);
}

}  // namespace fairsmile
