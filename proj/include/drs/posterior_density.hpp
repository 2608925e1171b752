#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "drs/core_model.hpp"
#include "drs/samplers.hpp"

namespace drs {

/// Mixture of NegativeBinomial(x0, mu_j) masses shifted by x0: the estimated
/// posterior mass function of N obtained by averaging the conditional of x00
/// over a posterior sample.
class NPosteriorMass {
 public:
  /// Throws EmptySample for no components and DomainError for mu outside (0, 1].
  NPosteriorMass(std::int64_t x0, std::vector<double> mus);

  double pmf(std::int64_t n) const;
  double mean() const;
  /// Masses for N = x0, x0 + 1, ..., up to the point where the remaining
  /// upper-tail mass of every component is below tail.
  std::vector<double> table(double tail = 1e-12) const;
  std::int64_t x0() const noexcept { return x0_; }
  std::size_t components() const noexcept { return mus_.size(); }

 private:
  std::int64_t x0_;
  std::vector<double> mus_;
};

/// Mixture mu_j = 1 - (1 - p_j)(1 - p1_j) for the N mass function.
std::vector<double> mixture_mus(std::span<const double> p1, std::span<const double> p);

/// Mixture of Beta(a_j, b_j) densities for a variable x = scale * y, with y
/// optionally restricted to [y_lo, y_hi] (each component renormalised).
class BetaMixture {
 public:
  struct Component {
    double a;
    double b;
  };

  /// Throws EmptySample for no components, DomainError for bad shapes or
  /// scale, EmptyTruncation when a component has no mass in [y_lo, y_hi].
  explicit BetaMixture(std::vector<Component> components, double scale = 1.0, double y_lo = 0.0,
                       double y_hi = 1.0);

  double pdf(double x) const;
  double cdf(double x) const;
  double mean() const;
  double lower() const noexcept { return scale_ * y_lo_; }
  double upper() const noexcept { return scale_ * y_hi_; }
  std::size_t components() const noexcept { return components_.size(); }

 private:
  std::vector<Component> components_;
  std::vector<double> lo_cdf_;
  std::vector<double> mass_;
  double scale_;
  double y_lo_;
  double y_hi_;
};

/// Density estimate for p1 from draws of N: mixture of Beta(x1. + 1, N_j - x1. + 1).
BetaMixture p1_posterior_density(const DrsTable& table, std::span<const std::int64_t> n_draws);

/// Density of phi given p and the prior: the truncated, rescaled Beta
/// conditional (it does not depend on N, so the mixture has one component).
BetaMixture phi_posterior_density(const DrsTable& table, double p, const PhiPrior& prior);

}  // namespace drs
