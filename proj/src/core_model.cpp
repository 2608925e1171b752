#include "drs/core_model.hpp"

#include <cmath>
#include <string>

#include "drs/error.hpp"
#include "numeric.hpp"

namespace drs {

double DrsTable::c_hat() const noexcept {
  return x1dot() > 0 ? static_cast<double>(x11) / static_cast<double>(x1dot()) : 0.0;
}

DrsTable validate_table(std::int64_t x11, std::int64_t x10, std::int64_t x01) {
  if (x11 < 0 || x10 < 0 || x01 < 0) {
    fail(ErrorCode::NegativeCount, "cell counts must be nonnegative (x11=" + std::to_string(x11) +
                                       ", x10=" + std::to_string(x10) +
                                       ", x01=" + std::to_string(x01) + ")");
  }
  DrsTable table{x11, x10, x01};
  if (table.x0() < 1) fail(ErrorCode::EmptyTable, "no individual was observed in either list");
  return table;
}

double CellProbs::cross_product_ratio() const noexcept { return p11 * p00 / (p01 * p10); }

MtEstimate mt_mle(const DrsTable& table) {
  if (table.x11 == 0) fail(ErrorCode::ZeroOverlap, "x11 = 0, the M_t estimator is undefined");
  const auto x11 = static_cast<double>(table.x11);
  // The integer product is exact, so n_hat is the correctly rounded quotient.
  const auto margin_product = static_cast<double>(table.xdot1() * table.x1dot());
  return MtEstimate{
      .n_hat = margin_product / x11,
      .p1_hat = x11 / static_cast<double>(table.xdot1()),
      .p_dot1_hat = x11 / static_cast<double>(table.x1dot()),
  };
}

double loglik_mt(std::int64_t n, double p1, double p_dot1, const DrsTable& table) {
  if (n < table.x0()) fail(ErrorCode::DomainError, "N is smaller than the observed total x0");
  if (!(p1 >= 0.0 && p1 <= 1.0 && p_dot1 >= 0.0 && p_dot1 <= 1.0)) {
    fail(ErrorCode::DomainError, "capture probabilities must lie in [0, 1]");
  }
  const auto nd = static_cast<double>(n);
  const auto x1dot = static_cast<double>(table.x1dot());
  const auto xdot1 = static_cast<double>(table.xdot1());
  return detail::log_falling_factorial(n, table.x0()) + detail::xlogy(x1dot, p1) +
         detail::xlogy(xdot1, p_dot1) + detail::xlog1my(nd - x1dot, p1) +
         detail::xlog1my(nd - xdot1, p_dot1);
}

double loglik_mtb(const MtbParams& params, const DrsTable& table) {
  if (params.n < table.x0()) fail(ErrorCode::DomainError, "N is smaller than the observed total x0");
  if (!(params.phi > 0.0)) fail(ErrorCode::DomainError, "phi must be positive");
  if (!(params.p1 >= 0.0 && params.p1 <= 1.0 && params.p >= 0.0 && params.p <= 1.0)) {
    fail(ErrorCode::DomainError, "capture probabilities must lie in [0, 1]");
  }
  if (params.phi * params.p >= 1.0) fail(ErrorCode::DomainError, "phi * p must be below 1");

  const auto nd = static_cast<double>(params.n);
  const auto x0 = static_cast<double>(table.x0());
  const auto x1dot = static_cast<double>(table.x1dot());
  return detail::log_falling_factorial(params.n, table.x0()) +
         detail::xlogy(static_cast<double>(table.x11), params.phi) +
         detail::xlogy(x1dot, params.p1) +
         detail::xlogy(static_cast<double>(table.xdot1()), params.p) +
         detail::xlog1my(nd - x1dot, params.p1) + detail::xlog1my(nd - x0, params.p) +
         detail::xlog1my(static_cast<double>(table.x10), params.phi * params.p);
}

double p_from_marginals(double p1, double p_dot1, double phi) {
  if (!(phi > 0.0) || !(p1 >= 0.0 && p1 <= 1.0) || !(p_dot1 > 0.0 && p_dot1 < 1.0)) {
    fail(ErrorCode::InfeasibleMarginals, "marginals outside their support");
  }
  const double p = p_dot1 / (1.0 + (phi - 1.0) * p1);
  if (!(p > 0.0 && p < 1.0) || phi * p >= 1.0) {
    fail(ErrorCode::InfeasibleMarginals,
         "no conditional probability p reproduces p.1 = " + std::to_string(p_dot1) +
             " with p1. = " + std::to_string(p1) + " and phi = " + std::to_string(phi));
  }
  return p;
}

CellProbs cell_probs(double p1, double p, double phi) {
  if (!(p1 >= 0.0 && p1 <= 1.0) || !(p >= 0.0 && p <= 1.0) || !(phi > 0.0) || phi * p >= 1.0) {
    fail(ErrorCode::DomainError, "cell probabilities need p1, p in [0,1], phi > 0, phi*p < 1");
  }
  const double c = phi * p;
  return CellProbs{
      .p11 = p1 * c,
      .p10 = p1 * (1.0 - c),
      .p01 = (1.0 - p1) * p,
      .p00 = (1.0 - p1) * (1.0 - p),
  };
}

}  // namespace drs
