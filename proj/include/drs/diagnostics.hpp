#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace drs {

using ChainTraces = std::vector<std::vector<double>>;

/// Square root of the potential scale reduction factor,
///   B = n/(m-1) sum_j (mean_j - mean)^2,  W = mean_j s_j^2,
///   V = (n-1)/n W + B/n,                 sqrt(R) = sqrt(V / W),
/// over the first n draws of each of the m chains (n = 0 means all draws).
/// Requires m >= 2, n >= 2 and equal-length chains; throws
/// ZeroWithinVariance when every chain is constant.
double psrf_sqrt(const ChainTraces& chains, std::size_t n = 0);

/// psrf_sqrt for burn-in scanning: identical constant chains count as mixed
/// (1.0), distinct constant chains as never mixed (+inf).
double checkpoint_psrf(const ChainTraces& chains, std::size_t n);

/// Smallest checkpoint h = k * check_interval whose value and the next two
/// checkpoint values are all below threshold. values[k - 1] is sqrt(R) at
/// checkpoint k * check_interval.
std::optional<std::size_t> burnin_from_checkpoints(std::span<const double> values,
                                                   double threshold,
                                                   std::size_t check_interval);

/// Burn-in index for the chains, or nullopt (NoConvergence) when no
/// checkpoint passes. Throws DomainError when threshold <= 1 or
/// check_interval = 0.
std::optional<std::size_t> select_burnin(const ChainTraces& chains, double threshold,
                                         std::size_t check_interval);

struct Summary {
  double mean = 0.0;
  double se = 0.0;  // sample standard deviation of the draws
  double ci_low = 0.0;
  double ci_high = 0.0;
  double cv = 0.0;  // se / |mean|

  friend bool operator==(const Summary&, const Summary&) = default;
};

/// Linear interpolation between order statistics (the "type 7" rule).
/// `sorted` must be ascending and nonempty.
double quantile_type7(std::span<const double> sorted, double prob);

/// Throws EmptySample on empty input and DomainError unless 0 < ci_level < 1.
Summary summarize(std::span<const double> draws, double ci_level = 0.95);

}  // namespace drs
