#pragma once

// Small numeric helpers shared by the library sources. Not installed.

#include <cmath>
#include <cstdint>

#include <boost/math/special_functions/gamma.hpp>

namespace drs::detail {

/// Thread-safe log-gamma (glibc's std::lgamma writes the global signgam).
inline double lgamma(double x) { return boost::math::lgamma(x); }

/// x * log(y) with the convention 0 * log(0) = 0.
inline double xlogy(double x, double y) { return x == 0.0 ? 0.0 : x * std::log(y); }

/// x * log(1 - y) with the convention 0 * log(0) = 0.
inline double xlog1my(double x, double y) { return x == 0.0 ? 0.0 : x * std::log1p(-y); }

/// log(n! / (n - k)!) via log-gamma.
inline double log_falling_factorial(std::int64_t n, std::int64_t k) {
  return lgamma(static_cast<double>(n) + 1.0) - lgamma(static_cast<double>(n - k) + 1.0);
}

/// Margin kept between sampled values and open support boundaries.
inline constexpr double kSupportShrink = 1e-12;
/// Margin used when a maximiser or draw is clamped inside its domain.
inline constexpr double kClampMargin = 1e-9;

}  // namespace drs::detail
