#pragma once

#include <cstdint>

namespace drs {

/// Observed dual-record table. The cell missed by both lists (x00) is unknown.
struct DrsTable {
  std::int64_t x11 = 0;  // in both lists
  std::int64_t x10 = 0;  // list 1 only
  std::int64_t x01 = 0;  // list 2 only

  std::int64_t x1dot() const noexcept { return x11 + x10; }
  std::int64_t xdot1() const noexcept { return x11 + x01; }
  std::int64_t x0() const noexcept { return x11 + x10 + x01; }

  /// Empirical recapture rate x11 / x1. (the MLE of c).
  double c_hat() const noexcept;

  friend bool operator==(const DrsTable&, const DrsTable&) = default;
};

/// Throws NegativeCount or EmptyTable.
DrsTable validate_table(std::int64_t x11, std::int64_t x10, std::int64_t x01);

/// Parameters of model M_tb: population size, list-1 capture probability,
/// list-2 capture probability for those missed by list 1, and the
/// behavioural response multiplier (recapture probability c = phi * p).
struct MtbParams {
  std::int64_t n = 0;
  double p1 = 0.5;
  double p = 0.5;
  double phi = 1.0;

  double c() const noexcept { return phi * p; }
  double mu() const noexcept { return 1.0 - (1.0 - p) * (1.0 - p1); }
};

struct CellProbs {
  double p11 = 0.0;
  double p10 = 0.0;
  double p01 = 0.0;
  double p00 = 0.0;

  double sum() const noexcept { return p11 + p10 + p01 + p00; }
  /// psi = p11 p00 / (p01 p10); equals 1 exactly when phi = 1.
  double cross_product_ratio() const noexcept;
};

struct MtEstimate {
  double n_hat = 0.0;
  double p1_hat = 0.0;
  double p_dot1_hat = 0.0;
};

/// Lincoln-Petersen estimates under independence. n_hat is not rounded.
/// Throws ZeroOverlap when x11 = 0.
MtEstimate mt_mle(const DrsTable& table);

/// Log-likelihood of M_t at (n, p1, p_dot1), dropping the multinomial
/// coefficient of the observed cells.
double loglik_mt(std::int64_t n, double p1, double p_dot1, const DrsTable& table);

/// Log-likelihood of M_tb, dropping the same constant as loglik_mt, so the two
/// agree when phi = 1. Throws DomainError when phi * p >= 1 or n < x0.
double loglik_mtb(const MtbParams& params, const DrsTable& table);

/// Conditional list-2 probability p that yields the marginal p_dot1 given
/// p1 and phi. Throws InfeasibleMarginals.
double p_from_marginals(double p1, double p_dot1, double phi);

/// Throws DomainError when the inputs are outside their support.
CellProbs cell_probs(double p1, double p, double phi);

}  // namespace drs
