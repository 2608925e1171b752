#include "drs/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "drs/error.hpp"
#include "numeric.hpp"

namespace drs {
namespace {

constexpr double kMargin = detail::kClampMargin;

double clamp_open(double x, double lo, double hi) {
  return std::clamp(x, lo + kMargin, hi - kMargin);
}

struct State {
  std::int64_t n = 0;
  double p1 = 0.5;
  double phi = 1.0;
  double p = 0.5;
};

double prior_midpoint(const PhiPrior& prior, const DrsTable& table) {
  if (!prior.is_flat()) return 1.0;
  auto [lo, hi] = prior.bounds();
  if (std::isinf(hi)) hi = std::max(lo, 1.0 / std::max(table.c_hat(), kMargin));
  return 0.5 * (lo + hi);
}

// Runs the chains in blocks of check_interval, scanning sqrt(R) of N at every
// checkpoint, until a burn-in is found and the retained draws are in.
template <typename Init, typename Step>
ChainSet run_chains(const MethodConfig& config, const RandomSource& rng, Init init, Step step) {
  validate_config(config);
  const std::size_t m = config.chains;
  const std::size_t ci = config.check_interval;

  std::vector<RandomSource> streams;
  std::vector<State> states;
  streams.reserve(m);
  for (std::size_t c = 0; c < m; ++c) {
    streams.push_back(rng.derive(c));
    states.push_back(init(streams.back()));
  }

  ChainSet out;
  out.chains.resize(m);
  out.check_interval = ci;
  ChainTraces n_traces(m);
  for (auto& chain : out.chains) {
    chain.n.reserve(4 * ci);
  }

  std::size_t length = 0;
  std::optional<std::size_t> h;
  while (length + ci <= config.max_iterations) {
    for (std::size_t c = 0; c < m; ++c) {
      auto& chain = out.chains[c];
      for (std::size_t i = 0; i < ci; ++i) {
        step(states[c], streams[c]);
        chain.n.push_back(states[c].n);
        chain.p1.push_back(states[c].p1);
        chain.phi.push_back(states[c].phi);
        chain.p.push_back(states[c].p);
        n_traces[c].push_back(static_cast<double>(states[c].n));
      }
    }
    length += ci;
    out.checkpoint_rhat.push_back(checkpoint_psrf(n_traces, length));
    if (!h) h = burnin_from_checkpoints(out.checkpoint_rhat, config.rhat_threshold, ci);
    if (h && length >= *h + config.retained.value_or(*h)) break;
  }

  if (h) {
    out.converged = true;
    out.burn_in = *h;
    out.retained = std::min(config.retained.value_or(*h), length - *h);
  } else {
    out.converged = false;
    out.burn_in = length / 2;
    out.retained = length - out.burn_in;
  }
  return out;
}

std::vector<double> retained_of(const ChainSet& set, auto member) {
  std::vector<double> out;
  out.reserve(set.chains.size() * set.retained);
  for (const auto& chain : set.chains) {
    const auto& values = chain.*member;
    const std::size_t end = std::min(values.size(), set.burn_in + set.retained);
    for (std::size_t i = set.burn_in; i < end; ++i) out.push_back(static_cast<double>(values[i]));
  }
  return out;
}

double mean_of(const std::vector<std::int64_t>& xs) {
  double s = 0.0;
  for (auto x : xs) s += static_cast<double>(x);
  return s / static_cast<double>(xs.size());
}

// Inner Gibbs sample of (N, p1[, phi]) at a fixed p. `stream` is always a
// fresh copy of the same substream, which makes the EM map deterministic.
struct InnerSample {
  std::vector<std::int64_t> n;
  std::vector<double> p1;
  std::vector<double> phi;
};

InnerSample inner_sample(const DrsTable& table, const MethodConfig& config, double p, double p1_start,
                         const PhiConditional* phi_conditional, RandomSource stream) {
  InnerSample out;
  const std::size_t total = config.inner_warmup + config.inner_size;
  out.n.reserve(config.inner_size);
  out.p1.reserve(config.inner_size);
  if (phi_conditional) out.phi.reserve(config.inner_size);
  const std::int64_t x0 = table.x0();
  double p1 = p1_start;
  for (std::size_t i = 0; i < total; ++i) {
    const std::int64_t n = x0 + sample_x00(x0, 1.0 - (1.0 - p) * (1.0 - p1), stream);
    p1 = sample_p1(table.x1dot(), n, stream);
    const double phi = phi_conditional ? phi_conditional->draw(stream) : 0.0;
    if (i < config.inner_warmup) continue;
    out.n.push_back(n);
    out.p1.push_back(p1);
    if (phi_conditional) out.phi.push_back(phi);
  }
  return out;
}

void require_overlap(const DrsTable& table) {
  if (table.x11 < 1) fail(ErrorCode::ZeroOverlap, "x11 = 0: no recaptures to estimate from");
}

}  // namespace

const char* to_string(Method method) noexcept {
  switch (method) {
    case Method::DA: return "da";
    case Method::EWiG1: return "ewig1";
    case Method::EWiG2: return "ewig2";
    case Method::SEMWiG: return "semwig";
  }
  return "?";
}

const char* to_string(Knowledge knowledge) noexcept {
  switch (knowledge) {
    case Knowledge::Prone: return "prone";
    case Knowledge::Averse: return "averse";
    case Knowledge::None: return "none";
  }
  return "?";
}

std::optional<Method> parse_method(std::string_view name) {
  for (auto m : {Method::DA, Method::EWiG1, Method::EWiG2, Method::SEMWiG}) {
    if (name == to_string(m)) return m;
  }
  return std::nullopt;
}

std::optional<Knowledge> parse_knowledge(std::string_view name) {
  for (auto k : {Knowledge::Prone, Knowledge::Averse, Knowledge::None}) {
    if (name == to_string(k)) return k;
  }
  return std::nullopt;
}

PhiPrior default_phi_prior(Knowledge knowledge, const DrsTable& table) {
  switch (knowledge) {
    case Knowledge::Prone:
      return PhiPrior::flat(1.0, std::numeric_limits<double>::infinity());
    case Knowledge::Averse:
      return PhiPrior::flat(std::min(table.c_hat(), 1.0 - kMargin), 1.0);
    case Knowledge::None:
      break;
  }
  return PhiPrior::gen_beta_one(1.0, 1.0);
}

PhiPrior resolve_phi_prior(const MethodConfig& config, const DrsTable& table) {
  return config.phi_prior ? *config.phi_prior : default_phi_prior(config.knowledge, table);
}

void validate_config(const MethodConfig& config) {
  if (config.chains < 2) fail(ErrorCode::DomainError, "at least two chains are needed for sqrt(R)");
  if (config.inner_size < 1) fail(ErrorCode::DomainError, "inner sample size M must be at least 1");
  if (config.check_interval < 1) fail(ErrorCode::DomainError, "check interval must be positive");
  if (!(config.rhat_threshold > 1.0)) fail(ErrorCode::DomainError, "sqrt(R) threshold must exceed 1");
  if (!(config.outer_tolerance > 0.0)) fail(ErrorCode::DomainError, "outer tolerance must be positive");
  if (config.retained && *config.retained < 1) {
    fail(ErrorCode::DomainError, "retained sample length must be positive");
  }
}

Interval ewig2_p_domain(Knowledge knowledge, const DrsTable& table) {
  const double c = table.c_hat();
  switch (knowledge) {
    case Knowledge::Prone: return {0.0, c};
    case Knowledge::Averse: return {c, 1.0};
    case Knowledge::None: break;
  }
  return {0.0, 1.0};
}

std::vector<double> ChainSet::retained_n() const { return retained_of(*this, &Chain::n); }
std::vector<double> ChainSet::retained_p1() const { return retained_of(*this, &Chain::p1); }
std::vector<double> ChainSet::retained_phi() const { return retained_of(*this, &Chain::phi); }
std::vector<double> ChainSet::retained_p() const { return retained_of(*this, &Chain::p); }

ChainTraces ChainSet::n_traces() const {
  ChainTraces out;
  out.reserve(chains.size());
  for (const auto& chain : chains) out.emplace_back(chain.n.begin(), chain.n.end());
  return out;
}

MStepResult m_step_p(std::span<const CompleteDraw> draws, const DrsTable& table, double v,
                     Interval domain) {
  if (draws.empty()) fail(ErrorCode::EmptySample, "M-step needs at least one draw");
  const auto a = static_cast<double>(table.xdot1());
  const auto x0 = static_cast<double>(table.x0());
  const double w = static_cast<double>(table.x10) + v - 1.0;

  double mean_b = 0.0;
  double max_phi = 0.0;
  for (const auto& d : draws) {
    if (static_cast<double>(d.n) < x0) fail(ErrorCode::DomainError, "draw with N < x0");
    if (!(d.phi > 0.0)) fail(ErrorCode::DomainError, "draw with phi <= 0");
    mean_b += static_cast<double>(d.n) - x0;
    max_phi = std::max(max_phi, d.phi);
  }
  mean_b /= static_cast<double>(draws.size());

  const double lo = std::max(domain.lo, 0.0) + kMargin;
  const double hi = std::min(domain.hi, p_support_upper(max_phi)) - kMargin;
  if (!(lo < hi)) fail(ErrorCode::OptimizerFailure, "empty search domain for p");

  const bool phi_term = w != 0.0;
  auto objective = [&](double p) {
    double f = detail::xlogy(a, p) + detail::xlog1my(mean_b, p);
    if (phi_term) {
      double s = 0.0;
      for (const auto& d : draws) s += std::log1p(-d.phi * p);
      f += w * s / static_cast<double>(draws.size());
    }
    return f;
  };

  // Golden-section search on [lo, hi].
  constexpr double kInvPhi = 0.6180339887498949;
  double left = lo;
  double right = hi;
  double x1 = right - kInvPhi * (right - left);
  double x2 = left + kInvPhi * (right - left);
  double f1 = objective(x1);
  double f2 = objective(x2);
  while (right - left > 1e-8) {
    if (f1 < f2) {
      left = x1;
      x1 = x2;
      f1 = f2;
      x2 = left + kInvPhi * (right - left);
      f2 = objective(x2);
    } else {
      right = x2;
      x2 = x1;
      f2 = f1;
      x1 = right - kInvPhi * (right - left);
      f1 = objective(x1);
    }
  }
  double best = 0.5 * (left + right);
  double f_best = objective(best);

  // The search interval collapses onto an end point when the maximiser lies
  // outside the domain.
  const double f_lo = objective(lo);
  const double f_hi = objective(hi);
  bool clipped = false;
  if (best - lo < 1e-7 && f_lo >= f_best) {
    best = lo;
    f_best = f_lo;
    clipped = true;
  } else if (hi - best < 1e-7 && f_hi >= f_best) {
    best = hi;
    f_best = f_hi;
    clipped = true;
  }
  if (!std::isfinite(f_best)) fail(ErrorCode::OptimizerFailure, "objective is not finite at the optimum");
  const double slack = 1e-9 * (1.0 + std::abs(f_best));
  if (f_best + slack < std::max(f_lo, f_hi)) {
    fail(ErrorCode::OptimizerFailure, "objective for p is not unimodal on the domain");
  }
  return {best, clipped};
}

Ewig2Update m_step_ewig2(double mean_n, const DrsTable& table, Knowledge knowledge,
                         double current_p) {
  const auto x0 = static_cast<double>(table.x0());
  if (!(mean_n >= x0)) fail(ErrorCode::DomainError, "mean N below x0");
  if (table.x1dot() < 1) fail(ErrorCode::DomainError, "x1. = 0");

  Ewig2Update out;
  out.c = clamp_open(table.c_hat(), 0.0, 1.0);
  const auto x01 = static_cast<double>(table.x01);
  const double missed = mean_n - x0;
  double p = current_p;
  if (x01 > 0.0 || missed > 0.0) p = x01 / (x01 + missed);

  const Interval domain = ewig2_p_domain(knowledge, table);
  const double lo = domain.lo + kMargin;
  const double hi = domain.hi - kMargin;
  if (!(lo < hi)) fail(ErrorCode::OptimizerFailure, "empty domain for p");
  out.clipped = p < lo || p > hi;
  out.p = std::clamp(p, lo, hi);
  p = out.p;
  out.phi = out.c / p;
  return out;
}

ChainSet run_da(const DrsTable& table, const MethodConfig& config, const RandomSource& rng) {
  require_overlap(table);
  const PhiPrior prior = resolve_phi_prior(config, table);
  const MtEstimate mt = mt_mle(table);
  const std::int64_t x0 = table.x0();
  const double phi0 = prior_midpoint(prior, table);

  auto init = [&](RandomSource& s) {
    State st;
    st.p1 = 0.1 + 0.8 * s.uniform();
    st.phi = phi0;
    st.p = std::clamp(table.c_hat() / phi0, kMargin, p_support_upper(phi0) - kMargin);
    st.n = std::max<std::int64_t>(x0, static_cast<std::int64_t>(std::ceil(mt.n_hat)));
    return st;
  };
  auto step = [&](State& st, RandomSource& s) {
    st.n = x0 + sample_x00(x0, 1.0 - (1.0 - st.p) * (1.0 - st.p1), s);
    st.p1 = sample_p1(table.x1dot(), st.n, s);
    st.p = sample_p_ars(st.n, st.phi, table, s);
    st.phi = sample_phi(table.x11, table.x10, st.p, prior, s);
  };
  return run_chains(config, rng, init, step);
}

ChainSet run_semwig(const DrsTable& table, const MethodConfig& config, const RandomSource& rng) {
  require_overlap(table);
  const PhiPrior prior = resolve_phi_prior(config, table);
  const MtEstimate mt = mt_mle(table);
  const std::int64_t x0 = table.x0();
  const double v = prior.v();
  const auto [phi_lo, phi_hi] = prior.bounds();

  auto init = [&](RandomSource&) {
    State st;
    st.p1 = clamp_open(mt.p1_hat, 0.0, 1.0);
    st.p = clamp_open(mt.p_dot1_hat, 0.0, 1.0);
    st.phi = std::clamp(1.0, phi_lo, std::min(phi_hi, 1.0 / st.p));
    st.n = std::max<std::int64_t>(x0, static_cast<std::int64_t>(std::ceil(mt.n_hat)));
    return st;
  };
  auto step = [&](State& st, RandomSource& s) {
    st.n = x0 + sample_x00(x0, 1.0 - (1.0 - st.p) * (1.0 - st.p1), s);
    st.p1 = sample_p1(table.x1dot(), st.n, s);
    st.phi = sample_phi(table.x11, table.x10, st.p, prior, s);
    const CompleteDraw draw{st.n, st.phi};
    st.p = m_step_p({&draw, 1}, table, v, {0.0, 1.0}).p;
  };
  return run_chains(config, rng, init, step);
}

EwigResult run_ewig1(const DrsTable& table, const MethodConfig& config, const RandomSource& rng) {
  require_overlap(table);
  validate_config(config);
  const PhiPrior prior = resolve_phi_prior(config, table);
  const MtEstimate mt = mt_mle(table);
  const double v = prior.v();
  const double p1_start = clamp_open(mt.p1_hat, 0.0, 1.0);

  auto sample_at = [&](double p) {
    const PhiConditional phi_conditional(table.x11, table.x10, p, prior);
    return inner_sample(table, config, p, p1_start, &phi_conditional, rng.derive(0));
  };

  EwigResult out;
  double p_hat = clamp_open(mt.p_dot1_hat, 0.0, 1.0);
  std::vector<CompleteDraw> draws(config.inner_size);
  for (std::size_t t = 0; t < config.max_outer_iterations; ++t) {
    const InnerSample sample = sample_at(p_hat);
    for (std::size_t j = 0; j < draws.size(); ++j) draws[j] = {sample.n[j], sample.phi[j]};
    const MStepResult step = m_step_p(draws, table, v, {0.0, 1.0});
    out.clipped = out.clipped || step.clipped;
    const double delta = std::abs(step.p - p_hat);
    p_hat = step.p;
    out.p_trace.push_back(p_hat);
    ++out.outer_iterations;
    if (delta < config.outer_tolerance) {
      out.converged = true;
      break;
    }
  }

  InnerSample final_sample = sample_at(p_hat);
  out.p_hat = p_hat;
  out.n = std::move(final_sample.n);
  out.p1 = std::move(final_sample.p1);
  out.phi = std::move(final_sample.phi);
  return out;
}

EwigResult run_ewig2(const DrsTable& table, const MethodConfig& config, const RandomSource& rng) {
  require_overlap(table);
  validate_config(config);
  const MtEstimate mt = mt_mle(table);
  const double p1_start = clamp_open(mt.p1_hat, 0.0, 1.0);
  const Interval domain = ewig2_p_domain(config.knowledge, table);
  if (!(domain.lo + kMargin < domain.hi - kMargin)) {
    fail(ErrorCode::OptimizerFailure, "empty domain for p under this knowledge");
  }

  auto sample_at = [&](double p) {
    return inner_sample(table, config, p, p1_start, nullptr, rng.derive(0));
  };

  EwigResult out;
  double p_hat = clamp_open(mt.p_dot1_hat, domain.lo, domain.hi);
  double phi_hat = clamp_open(table.c_hat(), 0.0, 1.0) / p_hat;
  for (std::size_t t = 0; t < config.max_outer_iterations; ++t) {
    const InnerSample sample = sample_at(p_hat);
    const Ewig2Update update = m_step_ewig2(mean_of(sample.n), table, config.knowledge, p_hat);
    out.clipped = out.clipped || update.clipped;
    const double delta = std::abs(update.p - p_hat);
    p_hat = update.p;
    phi_hat = update.phi;
    out.p_trace.push_back(p_hat);
    out.phi_trace.push_back(phi_hat);
    ++out.outer_iterations;
    if (delta < config.outer_tolerance) {
      out.converged = true;
      break;
    }
  }

  InnerSample final_sample = sample_at(p_hat);
  out.p_hat = p_hat;
  out.phi_hat = phi_hat;
  out.n = std::move(final_sample.n);
  out.p1 = std::move(final_sample.p1);
  out.phi.assign(out.n.size(), phi_hat);
  return out;
}

EstimationOutcome estimate(const DrsTable& table, const MethodConfig& config,
                           const RandomSource& rng) {
  EstimationOutcome out;
  out.method = config.method;
  out.prior = resolve_phi_prior(config, table);

  if (config.method == Method::DA || config.method == Method::SEMWiG) {
    ChainSet set = config.method == Method::DA ? run_da(table, config, rng)
                                               : run_semwig(table, config, rng);
    out.n_draws = set.retained_n();
    out.phi_draws = set.retained_phi();
    if (config.method == Method::DA) {
      out.p_draws = set.retained_p();
    } else {
      const auto ps = set.retained_p();
      out.p_hat = std::accumulate(ps.begin(), ps.end(), 0.0) / static_cast<double>(ps.size());
    }
    out.burn_in = set.burn_in;
    out.iterations = set.length();
    out.converged = set.converged;
    out.detail = std::move(set);
    return out;
  }

  EwigResult result = config.method == Method::EWiG1 ? run_ewig1(table, config, rng)
                                                     : run_ewig2(table, config, rng);
  out.n_draws.assign(result.n.begin(), result.n.end());
  out.phi_draws = result.phi;
  out.p_hat = result.p_hat;
  out.phi_hat = result.phi_hat;
  out.iterations = result.outer_iterations;
  out.converged = result.converged;
  out.clipped = result.clipped;
  out.detail = std::move(result);
  return out;
}

}  // namespace drs
