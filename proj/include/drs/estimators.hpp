#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "drs/core_model.hpp"
#include "drs/diagnostics.hpp"
#include "drs/random_source.hpp"
#include "drs/samplers.hpp"

namespace drs {

enum class Method { DA, EWiG1, EWiG2, SEMWiG };

/// What is believed about the direction of the behavioural response.
/// Prone (phi >= 1) puts the lower prior bound at 1, Averse (phi <= 1) puts the
/// upper bound at 1.
enum class Knowledge { Prone, Averse, None };

const char* to_string(Method method) noexcept;
const char* to_string(Knowledge knowledge) noexcept;
std::optional<Method> parse_method(std::string_view name);
std::optional<Knowledge> parse_knowledge(std::string_view name);

struct MethodConfig {
  Method method = Method::SEMWiG;
  std::size_t chains = 5;
  std::size_t inner_size = 1000;     // M, the EWiG inner sample size
  std::size_t inner_warmup = 100;    // EWiG inner draws discarded before the M kept
  std::size_t max_iterations = 20000;
  std::size_t max_outer_iterations = 500;
  std::size_t check_interval = 50;
  double rhat_threshold = 1.1;
  double outer_tolerance = 1e-6;
  Knowledge knowledge = Knowledge::None;
  std::optional<PhiPrior> phi_prior;  // defaults from knowledge when unset
  std::optional<std::size_t> retained;  // post-burn-in length; defaults to h
  std::uint64_t seed = 0;
};

/// Prone: U(1, 1/p). Averse: U(c_hat, 1). None: GB-I(1, 1, p).
PhiPrior default_phi_prior(Knowledge knowledge, const DrsTable& table);
PhiPrior resolve_phi_prior(const MethodConfig& config, const DrsTable& table);

/// Throws DomainError for configurations no engine can run (M = 0,
/// check_interval = 0, threshold <= 1, fewer than two chains).
void validate_config(const MethodConfig& config);

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

/// Domain of p for the EWiG-II M-step: (0, c_hat) for Prone, (c_hat, 1) for
/// Averse and (0, 1) otherwise.
Interval ewig2_p_domain(Knowledge knowledge, const DrsTable& table);

struct Chain {
  std::vector<std::int64_t> n;
  std::vector<double> p1;
  std::vector<double> phi;
  std::vector<double> p;  // sampled (DA) or the running p estimate (SEMWiG)

  std::size_t size() const noexcept { return n.size(); }
  friend bool operator==(const Chain&, const Chain&) = default;
};

struct ChainSet {
  std::vector<Chain> chains;
  std::size_t burn_in = 0;   // h
  std::size_t retained = 0;  // draws kept per chain after h
  std::size_t check_interval = 0;
  bool converged = false;
  std::vector<double> checkpoint_rhat;  // sqrt(R) of N at each checkpoint

  std::size_t length() const noexcept { return chains.empty() ? 0 : chains.front().size(); }
  std::vector<double> retained_n() const;
  std::vector<double> retained_p1() const;
  std::vector<double> retained_phi() const;
  std::vector<double> retained_p() const;
  ChainTraces n_traces() const;

  friend bool operator==(const ChainSet&, const ChainSet&) = default;
};

struct EwigResult {
  double p_hat = 0.0;
  std::optional<double> phi_hat;  // EWiG-II only
  // Final inner sample of size M drawn at the converged estimate.
  std::vector<std::int64_t> n;
  std::vector<double> p1;
  std::vector<double> phi;
  std::vector<double> p_trace;    // p estimate after each outer iteration
  std::vector<double> phi_trace;  // EWiG-II only
  std::size_t outer_iterations = 0;
  bool converged = false;
  bool clipped = false;

  friend bool operator==(const EwigResult&, const EwigResult&) = default;
};

/// Data augmentation: systematic-scan Gibbs over (x00, p1, p, phi) with m
/// overdispersed chains.
ChainSet run_da(const DrsTable& table, const MethodConfig& config, const RandomSource& rng);

/// EWiG-I: Monte Carlo EM in p with (x00, p1, phi) imputed by an inner Gibbs
/// sampler. The inner sampler reuses the same random stream at every outer
/// iteration, so the update map is deterministic and the fixed point can be
/// located to the outer tolerance.
EwigResult run_ewig1(const DrsTable& table, const MethodConfig& config, const RandomSource& rng);

/// EWiG-II: Monte Carlo EM in (p, phi) with (x00, p1) imputed.
EwigResult run_ewig2(const DrsTable& table, const MethodConfig& config, const RandomSource& rng);

/// Stochastic EM: one imputation of (x00, p1, phi) per iteration followed by
/// a single-draw M-step for p, on m chains.
ChainSet run_semwig(const DrsTable& table, const MethodConfig& config, const RandomSource& rng);

struct CompleteDraw {
  std::int64_t n = 0;
  double phi = 1.0;
};

struct MStepResult {
  double p = 0.0;
  bool clipped = false;  // maximiser sat on the domain boundary
};

/// Maximiser in p of the average over draws of
///   x.1 log p + (N - x0) log(1 - p) + (x10 + v - 1) log(1 - phi p)
/// on `domain`, by golden-section search to 1e-8. Throws EmptySample and
/// OptimizerFailure.
MStepResult m_step_p(std::span<const CompleteDraw> draws, const DrsTable& table, double v,
                     Interval domain);

struct Ewig2Update {
  double p = 0.0;
  double c = 0.0;
  double phi = 0.0;
  bool clipped = false;
};

/// Closed-form joint maximiser in (p, phi) through c = phi p:
/// c = x11 / x1. and p = x01 / (x01 + mean_n - x0), then p is clipped into
/// the knowledge domain. When the p objective is flat (x01 = 0 and
/// mean_n = x0) p stays at current_p.
Ewig2Update m_step_ewig2(double mean_n, const DrsTable& table, Knowledge knowledge,
                         double current_p);

/// Result of any engine in one shape, for reporting.
struct EstimationOutcome {
  Method method = Method::SEMWiG;
  PhiPrior prior = PhiPrior::gen_beta_one(1.0, 1.0);
  std::vector<double> n_draws;
  std::vector<double> phi_draws;
  std::vector<double> p_draws;  // DA only
  std::optional<double> p_hat;
  std::optional<double> phi_hat;
  std::size_t burn_in = 0;
  std::size_t iterations = 0;  // per-chain length, or outer iterations for EWiG
  bool converged = false;
  bool clipped = false;
  std::variant<ChainSet, EwigResult> detail;
};

EstimationOutcome estimate(const DrsTable& table, const MethodConfig& config,
                           const RandomSource& rng);

}  // namespace drs
