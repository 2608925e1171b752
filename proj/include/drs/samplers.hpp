#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "drs/core_model.hpp"
#include "drs/random_source.hpp"

namespace drs {

/// Flat prior U(alpha, beta) on phi. beta may be +infinity, in which case the
/// upper limit is the live bound 1/p.
struct FlatUniform {
  double alpha = 0.0;
  double beta = 1.0;
};

/// Generalised Beta type-I prior GB-I(u, v, 1, rate = p) on phi, supported on
/// (0, 1/p). (u, v) = (1, 1) is the flat prior U(0, 1/p).
struct GenBetaOne {
  double u = 1.0;
  double v = 1.0;
};

class PhiPrior {
 public:
  /// Throws DomainError unless 0 <= alpha < beta.
  static PhiPrior flat(double alpha, double beta);
  /// Throws DomainError unless u, v >= 0.
  static PhiPrior gen_beta_one(double u, double v);

  const std::variant<FlatUniform, GenBetaOne>& variant() const noexcept { return prior_; }
  bool is_flat() const noexcept { return std::holds_alternative<FlatUniform>(prior_); }

  /// (a, b) such that p*phi | x ~ Beta(x11 + a, x10 + b) before truncation.
  std::pair<double, double> shape_offsets() const noexcept;
  /// Exponent offset v in the (1 - phi p)^(x10 + v - 1) factor of the p objective.
  double v() const noexcept { return shape_offsets().second; }
  /// phi-interval [lo, hi] before intersecting with (0, 1/p).
  std::pair<double, double> bounds() const noexcept;

  std::string describe() const;

  friend bool operator==(const PhiPrior&, const PhiPrior&);

 private:
  explicit PhiPrior(std::variant<FlatUniform, GenBetaOne> prior) : prior_(prior) {}
  std::variant<FlatUniform, GenBetaOne> prior_;
};

/// Upper end of the support of p given phi: min(1, 1/phi) shrunk by 1e-12.
double p_support_upper(double phi);

/// x00 | (p1, p) ~ NegativeBinomial(size x0, success probability mu), the
/// conditional under the prior pi(N) proportional to 1/N. Exact inversion.
std::int64_t sample_x00(std::int64_t x0, double mu, RandomSource& rng);

/// p1 | N ~ Beta(x1. + 1, N - x1. + 1).
double sample_p1(std::int64_t x1dot, std::int64_t n, RandomSource& rng);

/// p | (N, phi) with density proportional to
/// p^x.1 (1 - p)^(N - x0) (1 - phi p)^x10 on (0, min(1, 1/phi)), drawn by
/// adaptive rejection sampling.
double sample_p_ars(std::int64_t n, double phi, const DrsTable& table, RandomSource& rng);

/// phi | p ~ GB-I(x11 + a, x10 + b, 1, rate = p) restricted to the prior
/// interval, where (a, b) are the prior's shape offsets. Throws
/// EmptyTruncation when the admissible interval carries no mass.
double sample_phi(std::int64_t x11, std::int64_t x10, double p, const PhiPrior& prior,
                  RandomSource& rng);

/// Beta(a, b) restricted to [lo, hi] by inversion of the regularised
/// incomplete beta function.
double sample_truncated_beta(double a, double b, double lo, double hi, RandomSource& rng);

/// Beta(a, b) restricted to [lo, hi], set up once for repeated draws. When the
/// interval holds at least a quarter of the mass, draws use plain rejection
/// from the untruncated Beta; otherwise they invert the incomplete beta with
/// bracketed Newton steps to 1e-12. Both routes are exact.
class TruncatedBeta {
 public:
  /// Throws DomainError for nonpositive shapes and EmptyTruncation when
  /// [lo, hi] carries no mass.
  TruncatedBeta(double a, double b, double lo, double hi);

  double draw(RandomSource& rng) const;
  double draw_by_inversion(RandomSource& rng) const;
  double mass() const noexcept { return mass_; }
  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }

 private:
  double a_;
  double b_;
  double lo_;
  double hi_;
  bool upper_tail_ = false;
  double g_lo_ = 0.0;
  double mass_ = 0.0;
};

/// The conditional of phi given p (and the prior), for repeated draws at a
/// fixed p.
class PhiConditional {
 public:
  PhiConditional(std::int64_t x11, std::int64_t x10, double p, const PhiPrior& prior);

  double draw(RandomSource& rng) const;
  double lower() const noexcept { return phi_lo_; }
  double upper() const noexcept { return phi_hi_; }

 private:
  struct Shape;
  PhiConditional(double p, const Shape& shape);
  static Shape shape_for(std::int64_t x11, std::int64_t x10, double p, const PhiPrior& prior);

  double p_;
  double phi_lo_;
  double phi_hi_;
  TruncatedBeta y_;
};

/// Tangent envelope of a log-concave density: abscissae with the log-density
/// and its derivative at each point.
struct ArsEnvelope {
  std::vector<double> abscissae;
  std::vector<double> log_density;
  std::vector<double> derivative;
};

/// Adaptive rejection sampler for the conditional of p. The envelope keeps
/// adapting across draws, so repeated draws from the same conditional get
/// cheaper. Throws EnvelopeFailure if log-concavity is violated.
class PConditionalSampler {
 public:
  PConditionalSampler(std::int64_t n, double phi, const DrsTable& table);

  double draw(RandomSource& rng);

  /// Unnormalised log-density and its derivative.
  double log_density(double p) const;
  double derivative(double p) const;

  double support_upper() const noexcept { return upper_; }
  const ArsEnvelope& envelope() const noexcept { return env_; }
  std::size_t proposals() const noexcept { return proposals_; }
  std::size_t accepted() const noexcept { return accepted_; }
  double acceptance_rate() const noexcept;

  static constexpr std::size_t kMaxAbscissae = 64;

 private:
  void insert(double x);
  void rebuild();

  double a_;  // exponent of p
  double b_;  // exponent of (1 - p)
  double c_;  // exponent of (1 - phi p)
  double phi_;
  double upper_;
  ArsEnvelope env_;
  std::vector<double> z_;          // hull breakpoints, z_[0] = 0, z_.back() = upper
  std::vector<double> log_mass_;   // log integral of exp(hull) on each piece
  std::vector<double> cum_mass_;   // normalised cumulative piece masses
  std::size_t proposals_ = 0;
  std::size_t accepted_ = 0;
};

}  // namespace drs
