#include "drs/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include <boost/math/special_functions/beta.hpp>
#include <boost/random/beta_distribution.hpp>

#include "drs/error.hpp"
#include "numeric.hpp"

namespace drs {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

}  // namespace

// ---------------------------------------------------------------------------
// PhiPrior

PhiPrior PhiPrior::flat(double alpha, double beta) {
  if (!(alpha >= 0.0) || !(beta > alpha)) {
    fail(ErrorCode::DomainError, "uniform prior on phi needs 0 <= alpha < beta");
  }
  return PhiPrior(FlatUniform{alpha, beta});
}

PhiPrior PhiPrior::gen_beta_one(double u, double v) {
  if (!(u >= 0.0) || !(v >= 0.0) || !std::isfinite(u) || !std::isfinite(v)) {
    fail(ErrorCode::DomainError, "generalised beta prior needs finite u, v >= 0");
  }
  return PhiPrior(GenBetaOne{u, v});
}

std::pair<double, double> PhiPrior::shape_offsets() const noexcept {
  if (const auto* g = std::get_if<GenBetaOne>(&prior_)) return {g->u, g->v};
  return {1.0, 1.0};
}

std::pair<double, double> PhiPrior::bounds() const noexcept {
  if (const auto* f = std::get_if<FlatUniform>(&prior_)) return {f->alpha, f->beta};
  return {0.0, kInf};
}

std::string PhiPrior::describe() const {
  if (const auto* f = std::get_if<FlatUniform>(&prior_)) {
    const std::string upper = std::isinf(f->beta) ? "1/p" : format_number(f->beta);
    return "U(" + format_number(f->alpha) + "," + upper + ")";
  }
  const auto& g = std::get<GenBetaOne>(prior_);
  return "GB-I(" + format_number(g.u) + "," + format_number(g.v) + ",p)";
}

bool operator==(const PhiPrior& lhs, const PhiPrior& rhs) {
  if (lhs.prior_.index() != rhs.prior_.index()) return false;
  if (lhs.is_flat()) {
    const auto& a = std::get<FlatUniform>(lhs.prior_);
    const auto& b = std::get<FlatUniform>(rhs.prior_);
    return a.alpha == b.alpha && a.beta == b.beta;
  }
  const auto& a = std::get<GenBetaOne>(lhs.prior_);
  const auto& b = std::get<GenBetaOne>(rhs.prior_);
  return a.u == b.u && a.v == b.v;
}

double p_support_upper(double phi) {
  if (!(phi > 0.0)) fail(ErrorCode::DomainError, "phi must be positive");
  return std::min(1.0, 1.0 / phi) - detail::kSupportShrink;
}

// ---------------------------------------------------------------------------
// x00 | (p1, p)

std::int64_t sample_x00(std::int64_t x0, double mu, RandomSource& rng) {
  if (x0 < 1) fail(ErrorCode::DomainError, "x0 must be at least 1");
  if (!(mu > 0.0 && mu <= 1.0)) fail(ErrorCode::DomainError, "mu must lie in (0, 1]");
  if (mu == 1.0) return 0;

  const auto r = static_cast<double>(x0);
  const double q = 1.0 - mu;
  const double mode_real = x0 > 1 ? std::floor((r - 1.0) * q / mu) : 0.0;
  if (mode_real > 1e15) fail(ErrorCode::DomainError, "mu too small for a finite x00 draw");
  auto k = static_cast<std::int64_t>(mode_real);

  // Inversion started at the mode: the cdf at the mode comes from the
  // regularised incomplete beta, neighbouring masses from the pmf recurrence.
  const auto kd = static_cast<double>(k);
  double pk = std::exp(detail::lgamma(kd + r) - detail::lgamma(r) - detail::lgamma(kd + 1.0) +
                       r * std::log(mu) + kd * std::log1p(-mu));
  double cdf = boost::math::ibeta(r, kd + 1.0, mu);
  const double u = rng.uniform();

  if (u <= cdf) {
    while (k > 0) {
      const double below = cdf - pk;
      if (u > below) break;
      cdf = below;
      pk *= static_cast<double>(k) / ((static_cast<double>(k) - 1.0 + r) * q);
      --k;
    }
    return k;
  }
  while (u > cdf) {
    pk *= (static_cast<double>(k) + r) * q / (static_cast<double>(k) + 1.0);
    ++k;
    cdf += pk;
    if (pk == 0.0) break;
  }
  return k;
}

// ---------------------------------------------------------------------------
// p1 | N

double sample_p1(std::int64_t x1dot, std::int64_t n, RandomSource& rng) {
  if (x1dot < 0 || n < x1dot) fail(ErrorCode::DomainError, "sample_p1 needs 0 <= x1. <= N");
  boost::random::beta_distribution<double> beta(static_cast<double>(x1dot) + 1.0,
                                                static_cast<double>(n - x1dot) + 1.0);
  const double p1 = beta(rng);
  return std::clamp(p1, detail::kSupportShrink, 1.0 - detail::kSupportShrink);
}

// ---------------------------------------------------------------------------
// truncated Beta and phi | p

TruncatedBeta::TruncatedBeta(double a, double b, double lo, double hi)
    : a_(a), b_(b), lo_(std::max(lo, 0.0)), hi_(std::min(hi, 1.0)) {
  if (!(a > 0.0 && b > 0.0)) fail(ErrorCode::DomainError, "Beta shapes must be positive");
  if (!(lo_ < hi_)) fail(ErrorCode::EmptyTruncation, "empty truncation interval");

  const double f_lo = boost::math::ibeta(a_, b_, lo_);
  // Survival functions keep the mass accurate when the interval sits in the
  // upper tail.
  upper_tail_ = f_lo > 0.5;
  double g_hi = 0.0;
  if (upper_tail_) {
    g_lo_ = -boost::math::ibetac(a_, b_, lo_);
    g_hi = -boost::math::ibetac(a_, b_, hi_);
  } else {
    g_lo_ = f_lo;
    g_hi = boost::math::ibeta(a_, b_, hi_);
  }
  mass_ = g_hi - g_lo_;
  if (!(mass_ > 0.0)) {
    fail(ErrorCode::EmptyTruncation, "Beta(" + format_number(a_) + "," + format_number(b_) +
                                         ") has no mass on [" + format_number(lo_) + "," +
                                         format_number(hi_) + "]");
  }
}

double TruncatedBeta::draw(RandomSource& rng) const {
  if (mass_ >= 0.25) {
    boost::random::beta_distribution<double> beta(a_, b_);
    for (int attempt = 0; attempt < 1000; ++attempt) {
      const double y = beta(rng);
      if (y >= lo_ && y <= hi_) return y;
    }
  }
  return draw_by_inversion(rng);
}

double TruncatedBeta::draw_by_inversion(RandomSource& rng) const {
  const double target = g_lo_ + rng.uniform() * mass_;
  auto g = [&](double y) {
    return (upper_tail_ ? -boost::math::ibetac(a_, b_, y) : boost::math::ibeta(a_, b_, y)) - target;
  };

  // Newton steps safeguarded by bisection inside the bracket [left, right].
  double left = lo_;
  double right = hi_;
  const double mean = a_ / (a_ + b_);
  double y = (mean > lo_ && mean < hi_) ? mean : 0.5 * (lo_ + hi_);
  for (int iter = 0; iter < 300; ++iter) {
    const double gy = g(y);
    if (gy == 0.0) break;
    (gy < 0.0 ? left : right) = y;
    if (right - left < 1e-12) {
      y = 0.5 * (left + right);
      break;
    }
    const double slope = boost::math::ibeta_derivative(a_, b_, y);
    double next = slope > 0.0 ? y - gy / slope : 0.5 * (left + right);
    if (!(next > left && next < right)) next = 0.5 * (left + right);
    const double step = std::abs(next - y);
    y = next;
    if (step < 1e-13) break;
  }
  return std::clamp(y, lo_, hi_);
}

double sample_truncated_beta(double a, double b, double lo, double hi, RandomSource& rng) {
  return TruncatedBeta(a, b, lo, hi).draw_by_inversion(rng);
}

struct PhiConditional::Shape {
  double a;
  double b;
  double phi_lo;
  double y_lo;
  double y_hi;
};

PhiConditional::Shape PhiConditional::shape_for(std::int64_t x11, std::int64_t x10, double p,
                                                const PhiPrior& prior) {
  if (x11 < 0 || x10 < 0) fail(ErrorCode::DomainError, "negative counts");
  if (!(p > 0.0 && p < 1.0)) fail(ErrorCode::DomainError, "p must lie in (0, 1)");
  const auto [offset_a, offset_b] = prior.shape_offsets();
  const double a = static_cast<double>(x11) + offset_a;
  const double b = static_cast<double>(x10) + offset_b;
  if (!(a > 0.0 && b > 0.0)) {
    fail(ErrorCode::DomainError, "improper conditional for phi (shape parameter <= 0)");
  }
  const auto [phi_lo, phi_hi] = prior.bounds();
  const double y_lo = p * phi_lo;
  const double y_hi = std::min(std::isinf(phi_hi) ? 1.0 : p * phi_hi, 1.0 - detail::kSupportShrink);
  if (!(y_lo < y_hi)) {
    fail(ErrorCode::EmptyTruncation, "prior " + prior.describe() + " does not meet (0, 1/p) at p = " +
                                         format_number(p));
  }
  return {a, b, phi_lo, y_lo, y_hi};
}

PhiConditional::PhiConditional(std::int64_t x11, std::int64_t x10, double p, const PhiPrior& prior)
    : PhiConditional(p, shape_for(x11, x10, p, prior)) {}

PhiConditional::PhiConditional(double p, const Shape& shape)
    : p_(p),
      phi_lo_(shape.phi_lo),
      phi_hi_(shape.y_hi / p),
      y_(shape.a, shape.b, shape.y_lo, shape.y_hi) {}

double PhiConditional::draw(RandomSource& rng) const {
  return std::clamp(y_.draw(rng) / p_, phi_lo_, phi_hi_);
}

double sample_phi(std::int64_t x11, std::int64_t x10, double p, const PhiPrior& prior,
                  RandomSource& rng) {
  return PhiConditional(x11, x10, p, prior).draw(rng);
}

// ---------------------------------------------------------------------------
// Adaptive rejection sampling for p | (N, phi)

PConditionalSampler::PConditionalSampler(std::int64_t n, double phi, const DrsTable& table) {
  if (!(phi > 0.0)) fail(ErrorCode::DomainError, "phi must be positive");
  if (n < table.x0()) fail(ErrorCode::DomainError, "N is smaller than x0");
  a_ = static_cast<double>(table.xdot1());
  b_ = static_cast<double>(n - table.x0());
  c_ = static_cast<double>(table.x10);
  phi_ = phi;
  upper_ = p_support_upper(phi);

  const double s = upper_;
  const double anchor = std::clamp(table.c_hat() / phi, 1e-6 * s, (1.0 - 1e-6) * s);
  std::vector<double> xs{0.05 * s, 0.275 * s, anchor, 0.725 * s, 0.95 * s};
  std::sort(xs.begin(), xs.end());
  for (double x : xs) {
    if (!env_.abscissae.empty() && x - env_.abscissae.back() < 1e-9 * s) continue;
    env_.abscissae.push_back(x);
    env_.log_density.push_back(log_density(x));
    env_.derivative.push_back(derivative(x));
  }
  for (std::size_t i = 1; i < env_.abscissae.size(); ++i) {
    if (env_.derivative[i] > env_.derivative[i - 1] + 1e-7 * (1.0 + std::abs(env_.derivative[i]))) {
      fail(ErrorCode::EnvelopeFailure, "initial abscissae violate log-concavity");
    }
  }
  rebuild();
}

double PConditionalSampler::log_density(double p) const {
  return detail::xlogy(a_, p) + detail::xlog1my(b_, p) + detail::xlog1my(c_, phi_ * p);
}

double PConditionalSampler::derivative(double p) const {
  return a_ / p - b_ / (1.0 - p) - c_ * phi_ / (1.0 - phi_ * p);
}

double PConditionalSampler::acceptance_rate() const noexcept {
  return proposals_ == 0 ? 0.0 : static_cast<double>(accepted_) / static_cast<double>(proposals_);
}

void PConditionalSampler::rebuild() {
  const auto& x = env_.abscissae;
  const auto& h = env_.log_density;
  const auto& d = env_.derivative;
  const std::size_t n = x.size();

  z_.assign(n + 1, 0.0);
  z_[0] = 0.0;
  z_[n] = upper_;
  for (std::size_t i = 1; i < n; ++i) {
    const double dd = d[i - 1] - d[i];
    double z = 0.5 * (x[i - 1] + x[i]);
    if (dd > 1e-12 * (1.0 + std::abs(d[i - 1]) + std::abs(d[i]))) {
      z = (h[i] - h[i - 1] - x[i] * d[i] + x[i - 1] * d[i - 1]) / dd;
    }
    z_[i] = std::clamp(z, x[i - 1], x[i]);
  }

  log_mass_.assign(n, -std::numeric_limits<double>::infinity());
  double max_log = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double zl = z_[i];
    const double zr = z_[i + 1];
    const double w = zr - zl;
    if (!(w > 0.0)) continue;
    const double ul = h[i] + d[i] * (zl - x[i]);
    const double ur = h[i] + d[i] * (zr - x[i]);
    const double dw = d[i] * w;
    double lm = 0.0;
    if (std::abs(dw) < 1e-10) {
      lm = std::log(w) + 0.5 * (ul + ur);
    } else if (d[i] > 0.0) {
      lm = ur + std::log(-std::expm1(-dw)) - std::log(d[i]);
    } else {
      lm = ul + std::log(-std::expm1(dw)) - std::log(-d[i]);
    }
    log_mass_[i] = lm;
    max_log = std::max(max_log, lm);
  }
  cum_mass_.assign(n, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    total += std::exp(log_mass_[i] - max_log);
    cum_mass_[i] = total;
  }
  for (double& c : cum_mass_) c /= total;
}

void PConditionalSampler::insert(double xnew) {
  auto& x = env_.abscissae;
  if (x.size() >= kMaxAbscissae) return;
  const auto pos = std::lower_bound(x.begin(), x.end(), xnew);
  const auto k = static_cast<std::size_t>(pos - x.begin());
  const double tol_x = 1e-12 * upper_;
  if ((k < x.size() && x[k] - xnew < tol_x) || (k > 0 && xnew - x[k - 1] < tol_x)) return;

  const double hx = log_density(xnew);
  const double dx = derivative(xnew);
  // Tangents must be ordered and lie above the target at the new point.
  auto tol = [](double v) { return 1e-7 * (1.0 + std::abs(v)); };
  if (k > 0) {
    const double tangent = env_.log_density[k - 1] + env_.derivative[k - 1] * (xnew - x[k - 1]);
    if (dx > env_.derivative[k - 1] + tol(dx) || tangent < hx - tol(hx)) {
      fail(ErrorCode::EnvelopeFailure, "log-concavity violated at p = " + format_number(xnew));
    }
  }
  if (k < x.size()) {
    const double tangent = env_.log_density[k] + env_.derivative[k] * (xnew - x[k]);
    if (dx < env_.derivative[k] - tol(dx) || tangent < hx - tol(hx)) {
      fail(ErrorCode::EnvelopeFailure, "log-concavity violated at p = " + format_number(xnew));
    }
  }
  x.insert(pos, xnew);
  env_.log_density.insert(env_.log_density.begin() + static_cast<std::ptrdiff_t>(k), hx);
  env_.derivative.insert(env_.derivative.begin() + static_cast<std::ptrdiff_t>(k), dx);
  rebuild();
}

double PConditionalSampler::draw(RandomSource& rng) {
  constexpr std::size_t kMaxProposals = 100000;
  for (std::size_t attempt = 0; attempt < kMaxProposals; ++attempt) {
    ++proposals_;
    const auto& xs = env_.abscissae;
    const auto& hs = env_.log_density;
    const auto& ds = env_.derivative;

    const double u_piece = rng.uniform();
    const auto i = static_cast<std::size_t>(
        std::lower_bound(cum_mass_.begin(), cum_mass_.end(), u_piece) - cum_mass_.begin());
    const std::size_t piece = std::min(i, xs.size() - 1);
    const double zl = z_[piece];
    const double zr = z_[piece + 1];
    const double w = zr - zl;
    const double d = ds[piece];
    const double u = rng.uniform();
    double x = 0.0;
    if (std::abs(d * w) < 1e-10) {
      x = zl + u * w;
    } else if (d > 0.0) {
      x = zr + std::log(u + (1.0 - u) * std::exp(-d * w)) / d;
    } else {
      x = zl + std::log1p(u * std::expm1(d * w)) / d;
    }
    x = std::clamp(x, zl, zr);
    if (!(x > 0.0 && x < upper_)) continue;

    const double hull = hs[piece] + d * (x - xs[piece]);
    const double log_w = std::log(rng.uniform());

    if (x >= xs.front() && x <= xs.back()) {
      const auto k = static_cast<std::size_t>(std::upper_bound(xs.begin(), xs.end(), x) - xs.begin());
      if (k > 0 && k < xs.size()) {
        const double t = (x - xs[k - 1]) / (xs[k] - xs[k - 1]);
        const double squeeze = (1.0 - t) * hs[k - 1] + t * hs[k];
        if (log_w <= squeeze - hull) {
          ++accepted_;
          return x;
        }
      }
    }
    const double hx = log_density(x);
    if (hx > hull + 1e-7 * (1.0 + std::abs(hx))) {
      fail(ErrorCode::EnvelopeFailure, "target exceeds the tangent envelope at p = " + format_number(x));
    }
    const bool accept = log_w <= hx - hull;
    insert(x);
    if (accept) {
      ++accepted_;
      return x;
    }
  }
  fail(ErrorCode::EnvelopeFailure, "adaptive rejection sampler made no progress");
}

double sample_p_ars(std::int64_t n, double phi, const DrsTable& table, RandomSource& rng) {
  PConditionalSampler sampler(n, phi, table);
  return sampler.draw(rng);
}

}  // namespace drs
