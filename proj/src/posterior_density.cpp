#include "drs/posterior_density.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/special_functions/beta.hpp>

#include "drs/error.hpp"
#include "numeric.hpp"

namespace drs {

NPosteriorMass::NPosteriorMass(std::int64_t x0, std::vector<double> mus)
    : x0_(x0), mus_(std::move(mus)) {
  if (mus_.empty()) fail(ErrorCode::EmptySample, "no draws for the N mass function");
  if (x0_ < 1) fail(ErrorCode::DomainError, "x0 must be at least 1");
  for (double mu : mus_) {
    if (!(mu > 0.0 && mu <= 1.0)) fail(ErrorCode::DomainError, "mu must lie in (0, 1]");
  }
}

double NPosteriorMass::pmf(std::int64_t n) const {
  if (n < x0_) return 0.0;
  const auto k = static_cast<double>(n - x0_);
  const auto r = static_cast<double>(x0_);
  const double log_coef = detail::lgamma(k + r) - detail::lgamma(r) - detail::lgamma(k + 1.0);
  double total = 0.0;
  for (double mu : mus_) {
    if (mu == 1.0) {
      total += k == 0.0 ? 1.0 : 0.0;
      continue;
    }
    total += std::exp(log_coef + r * std::log(mu) + k * std::log1p(-mu));
  }
  return total / static_cast<double>(mus_.size());
}

double NPosteriorMass::mean() const {
  const auto r = static_cast<double>(x0_);
  double total = 0.0;
  for (double mu : mus_) total += r * (1.0 - mu) / mu;
  return static_cast<double>(x0_) + total / static_cast<double>(mus_.size());
}

std::vector<double> NPosteriorMass::table(double tail) const {
  const auto r = static_cast<double>(x0_);
  // Upper cut-off: far enough into every component's geometric tail that the
  // remaining mass is below `tail`.
  double k_max = 0.0;
  for (double mu : mus_) {
    const double q = 1.0 - mu;
    if (q <= 0.0) continue;
    const double mean = r * q / mu;
    const double sd = std::sqrt(r * q) / mu;
    const double decay = -std::log(q);  // per-step log ratio far in the tail
    const double extra = (-std::log(tail) + 10.0) / std::max(decay, 1e-300);
    k_max = std::max(k_max, mean + 10.0 * sd + std::min(extra, 1e8));
  }
  const auto size = static_cast<std::size_t>(std::ceil(k_max)) + 1;

  std::vector<double> masses(size, 0.0);
  for (double mu : mus_) {
    if (mu == 1.0) {
      masses[0] += 1.0;
      continue;
    }
    const double log_q = std::log1p(-mu);
    double log_pk = r * std::log(mu);
    masses[0] += std::exp(log_pk);
    for (std::size_t k = 1; k < size; ++k) {
      const auto kd = static_cast<double>(k);
      log_pk += std::log((kd - 1.0 + r) / kd) + log_q;
      masses[k] += std::exp(log_pk);
    }
  }
  for (double& m : masses) m /= static_cast<double>(mus_.size());
  while (masses.size() > 1 && masses.back() < tail * 1e-6) masses.pop_back();
  return masses;
}

std::vector<double> mixture_mus(std::span<const double> p1, std::span<const double> p) {
  if (p1.size() != p.size()) fail(ErrorCode::DomainError, "p1 and p draws differ in length");
  std::vector<double> mus(p1.size());
  for (std::size_t j = 0; j < p1.size(); ++j) mus[j] = 1.0 - (1.0 - p[j]) * (1.0 - p1[j]);
  return mus;
}

BetaMixture::BetaMixture(std::vector<Component> components, double scale, double y_lo, double y_hi)
    : components_(std::move(components)), scale_(scale), y_lo_(y_lo), y_hi_(y_hi) {
  if (components_.empty()) fail(ErrorCode::EmptySample, "no draws for the density estimate");
  if (!(scale_ > 0.0) || !std::isfinite(scale_)) fail(ErrorCode::DomainError, "scale must be positive");
  if (!(0.0 <= y_lo_ && y_lo_ < y_hi_ && y_hi_ <= 1.0)) {
    fail(ErrorCode::DomainError, "truncation must satisfy 0 <= lo < hi <= 1");
  }
  lo_cdf_.reserve(components_.size());
  mass_.reserve(components_.size());
  for (const auto& c : components_) {
    if (!(c.a > 0.0 && c.b > 0.0)) fail(ErrorCode::DomainError, "Beta shapes must be positive");
    const double lo = boost::math::ibeta(c.a, c.b, y_lo_);
    const double mass = boost::math::ibeta(c.a, c.b, y_hi_) - lo;
    if (!(mass > 0.0)) fail(ErrorCode::EmptyTruncation, "component has no mass on the interval");
    lo_cdf_.push_back(lo);
    mass_.push_back(mass);
  }
}

double BetaMixture::pdf(double x) const {
  const double y = x / scale_;
  if (!(y >= y_lo_ && y <= y_hi_) || y <= 0.0 || y >= 1.0) return 0.0;
  double total = 0.0;
  for (std::size_t j = 0; j < components_.size(); ++j) {
    total += boost::math::ibeta_derivative(components_[j].a, components_[j].b, y) / mass_[j];
  }
  return total / (static_cast<double>(components_.size()) * scale_);
}

double BetaMixture::cdf(double x) const {
  const double y = std::clamp(x / scale_, y_lo_, y_hi_);
  double total = 0.0;
  for (std::size_t j = 0; j < components_.size(); ++j) {
    total += (boost::math::ibeta(components_[j].a, components_[j].b, y) - lo_cdf_[j]) / mass_[j];
  }
  return std::clamp(total / static_cast<double>(components_.size()), 0.0, 1.0);
}

double BetaMixture::mean() const {
  double total = 0.0;
  for (std::size_t j = 0; j < components_.size(); ++j) {
    const auto [a, b] = components_[j];
    // E[Y; lo < Y < hi] = a / (a + b) * P_{Beta(a+1, b)}(lo < Y < hi)
    const double partial = boost::math::ibeta(a + 1.0, b, y_hi_) - boost::math::ibeta(a + 1.0, b, y_lo_);
    total += a / (a + b) * partial / mass_[j];
  }
  return scale_ * total / static_cast<double>(components_.size());
}

BetaMixture p1_posterior_density(const DrsTable& table, std::span<const std::int64_t> n_draws) {
  std::vector<BetaMixture::Component> components;
  components.reserve(n_draws.size());
  const auto x1dot = table.x1dot();
  for (auto n : n_draws) {
    if (n < table.x0()) fail(ErrorCode::DomainError, "draw with N < x0");
    components.push_back({static_cast<double>(x1dot) + 1.0, static_cast<double>(n - x1dot) + 1.0});
  }
  return BetaMixture(std::move(components));
}

BetaMixture phi_posterior_density(const DrsTable& table, double p, const PhiPrior& prior) {
  if (!(p > 0.0 && p < 1.0)) fail(ErrorCode::DomainError, "p must lie in (0, 1)");
  const auto [a, b] = prior.shape_offsets();
  const auto [phi_lo, phi_hi] = prior.bounds();
  const double y_lo = std::min(p * phi_lo, 1.0);
  const double y_hi = std::min(std::isinf(phi_hi) ? 1.0 : p * phi_hi, 1.0 - detail::kSupportShrink);
  if (!(y_lo < y_hi)) fail(ErrorCode::EmptyTruncation, "prior does not meet (0, 1/p)");
  return BetaMixture({{static_cast<double>(table.x11) + a, static_cast<double>(table.x10) + b}},
                     1.0 / p, y_lo, y_hi);
}

}  // namespace drs
