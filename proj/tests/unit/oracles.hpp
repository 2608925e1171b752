#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

// Largest gap between the empirical CDF of `draws` and `cdf`.
inline double ks_statistic(std::vector<double> draws, const std::function<double(double)>& cdf) {
  std::sort(draws.begin(), draws.end());
  const auto n = static_cast<double>(draws.size());
  double d = 0.0;
  for (std::size_t i = 0; i < draws.size(); ++i) {
    const double f = cdf(draws[i]);
    if (!std::isfinite(f)) return 1.0;
    d = std::max({d, std::abs(static_cast<double>(i + 1) / n - f), std::abs(f - static_cast<double>(i) / n)});
  }
  return d;
}

// CDF of an unnormalised log-density on [lo, hi], tabulated by the
// trapezoid rule on `points` grid nodes and interpolated linearly.
class GridCdf {
 public:
  GridCdf(const std::function<double(double)>& log_density, double lo, double hi, std::size_t points)
      : lo_(lo), step_((hi - lo) / static_cast<double>(points - 1)), cum_(points, 0.0) {
    std::vector<double> logs(points);
    double top = -INFINITY;
    for (std::size_t i = 0; i < points; ++i) {
      const double x = i + 1 == points ? hi : lo + step_ * static_cast<double>(i);
      logs[i] = log_density(x);
      if (std::isnan(logs[i])) logs[i] = -INFINITY;
      top = std::max(top, logs[i]);
    }
    for (std::size_t i = 1; i < points; ++i) {
      cum_[i] = cum_[i - 1] + 0.5 * step_ * (std::exp(logs[i - 1] - top) + std::exp(logs[i] - top));
    }
    for (double& c : cum_) c /= cum_.back();
  }

  double operator()(double x) const {
    const double t = (x - lo_) / step_;
    if (t <= 0.0) return 0.0;
    const auto i = static_cast<std::size_t>(t);
    if (i + 1 >= cum_.size()) return 1.0;
    const double frac = t - static_cast<double>(i);
    return cum_[i] + frac * (cum_[i + 1] - cum_[i]);
  }

 private:
  double lo_;
  double step_;
  std::vector<double> cum_;
};

inline double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double sd_of(const std::vector<double>& v) {
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace oracle
