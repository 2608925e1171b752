#include "drs/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "drs/error.hpp"

namespace drs {
namespace {

struct Moments {
  double mean = 0.0;
  double var = 0.0;  // unbiased
};

Moments moments(const std::vector<double>& xs, std::size_t n) {
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += xs[i];
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) ss += (xs[i] - mean) * (xs[i] - mean);
  return {mean, ss / static_cast<double>(n - 1)};
}

struct PsrfParts {
  double b = 0.0;
  double w = 0.0;
  double n = 0.0;
};

PsrfParts psrf_parts(const ChainTraces& chains, std::size_t n) {
  if (chains.size() < 2) fail(ErrorCode::DomainError, "sqrt(R) needs at least two chains");
  if (n == 0) n = chains.front().size();
  for (const auto& c : chains) {
    if (c.size() < n) fail(ErrorCode::DomainError, "chains are shorter than the requested length");
  }
  if (n < 2) fail(ErrorCode::DomainError, "sqrt(R) needs at least two draws per chain");

  const auto m = static_cast<double>(chains.size());
  const auto nd = static_cast<double>(n);
  std::vector<Moments> per_chain;
  per_chain.reserve(chains.size());
  double grand = 0.0;
  for (const auto& c : chains) {
    per_chain.push_back(moments(c, n));
    grand += per_chain.back().mean;
  }
  grand /= m;
  double between = 0.0;
  double within = 0.0;
  for (const auto& mo : per_chain) {
    between += (mo.mean - grand) * (mo.mean - grand);
    within += mo.var;
  }
  return {nd / (m - 1.0) * between, within / m, nd};
}

}  // namespace

double psrf_sqrt(const ChainTraces& chains, std::size_t n) {
  const auto parts = psrf_parts(chains, n);
  if (!(parts.w > 0.0)) fail(ErrorCode::ZeroWithinVariance, "every chain is constant");
  const double v = (parts.n - 1.0) / parts.n * parts.w + parts.b / parts.n;
  return std::sqrt(v / parts.w);
}

double checkpoint_psrf(const ChainTraces& chains, std::size_t n) {
  const auto parts = psrf_parts(chains, n);
  if (parts.w > 0.0) {
    const double v = (parts.n - 1.0) / parts.n * parts.w + parts.b / parts.n;
    return std::sqrt(v / parts.w);
  }
  return parts.b > 0.0 ? std::numeric_limits<double>::infinity() : 1.0;
}

std::optional<std::size_t> burnin_from_checkpoints(std::span<const double> values,
                                                   double threshold,
                                                   std::size_t check_interval) {
  for (std::size_t k = 0; k + 2 < values.size(); ++k) {
    if (values[k] < threshold && values[k + 1] < threshold && values[k + 2] < threshold) {
      return (k + 1) * check_interval;
    }
  }
  return std::nullopt;
}

std::optional<std::size_t> select_burnin(const ChainTraces& chains, double threshold,
                                         std::size_t check_interval) {
  if (!(threshold > 1.0)) fail(ErrorCode::DomainError, "threshold must exceed 1");
  if (check_interval == 0) fail(ErrorCode::DomainError, "check interval must be positive");
  if (chains.empty()) return std::nullopt;
  std::size_t length = chains.front().size();
  for (const auto& c : chains) length = std::min(length, c.size());

  std::vector<double> values;
  for (std::size_t h = check_interval; h <= length; h += check_interval) {
    values.push_back(h >= 2 ? checkpoint_psrf(chains, h) : std::numeric_limits<double>::infinity());
  }
  return burnin_from_checkpoints(values, threshold, check_interval);
}

double quantile_type7(std::span<const double> sorted, double prob) {
  if (sorted.empty()) fail(ErrorCode::EmptySample, "quantile of an empty sample");
  const double pos = prob * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

Summary summarize(std::span<const double> draws, double ci_level) {
  if (draws.empty()) fail(ErrorCode::EmptySample, "no draws to summarise");
  if (!(ci_level > 0.0 && ci_level < 1.0)) {
    fail(ErrorCode::DomainError, "credible level must lie in (0, 1)");
  }
  std::vector<double> sorted(draws.begin(), draws.end());
  std::sort(sorted.begin(), sorted.end());

  // Summing the sorted copy makes the result independent of draw order.
  double mean = 0.0;
  for (double x : sorted) mean += x;
  mean /= static_cast<double>(sorted.size());
  double ss = 0.0;
  for (double x : sorted) ss += (x - mean) * (x - mean);
  const double se = sorted.size() > 1 ? std::sqrt(ss / static_cast<double>(sorted.size() - 1)) : 0.0;

  Summary s;
  s.mean = mean;
  s.se = se;
  s.ci_low = quantile_type7(sorted, (1.0 - ci_level) / 2.0);
  s.ci_high = quantile_type7(sorted, (1.0 + ci_level) / 2.0);
  s.cv = mean != 0.0 ? se / std::abs(mean) : 0.0;
  return s;
}

}  // namespace drs
