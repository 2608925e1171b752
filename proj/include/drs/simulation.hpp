#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "drs/core_model.hpp"
#include "drs/estimators.hpp"
#include "drs/random_source.hpp"

namespace drs {

/// A hypothetical population: true size, behavioural response and the two
/// marginal capture probabilities p1. and p.1.
struct PopulationSpec {
  std::string name;
  std::int64_t n_true = 500;
  double phi = 1.0;
  double p1 = 0.5;
  double p_dot1 = 0.5;

  friend bool operator==(const PopulationSpec&, const PopulationSpec&) = default;
};

/// P1-P8, all with N = 500.
const std::vector<PopulationSpec>& builtin_populations();
std::optional<PopulationSpec> find_population(std::string_view name);

/// Throws DomainError for a nonpositive size or phi, InfeasibleMarginals when
/// no conditional p reproduces the marginals.
void validate_population(const PopulationSpec& spec);

/// Cell probabilities implied by the spec.
CellProbs population_cells(const PopulationSpec& spec);

/// N (1 - p00), the expected number of distinct individuals captured.
double expected_x0(const PopulationSpec& spec);

/// One multinomial(N; p11, p10, p01, p00) draw; the x00 cell is dropped.
/// The result is not validated, so it may have x11 = 0.
DrsTable generate_dataset(const PopulationSpec& spec, RandomSource& rng);

struct ReplicateEstimate {
  double estimate = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  bool converged = true;
};

/// Estimates N from one replicate table using the given random stream.
using ReplicateEstimator = std::function<ReplicateEstimate(const DrsTable&, const RandomSource&)>;

struct ReplicateRecord {
  std::size_t index = 0;
  DrsTable table;
  bool failed = false;
  std::string error;  // set when failed
  ReplicateEstimate result;
};

struct StudyResult {
  PopulationSpec spec;
  std::size_t n_reps = 0;
  std::size_t failed = 0;
  std::size_t not_converged = 0;
  double mean_estimate = 0.0;
  double sample_se = 0.0;  // sample sd of the replicate estimates
  double rmse = 0.0;
  double coverage_pct = 0.0;
  double ci_low = 0.0;   // average of replicate interval limits
  double ci_high = 0.0;
  std::vector<ReplicateRecord> records;
};

/// Posterior mean of N with its central 95% interval, from `config`.
ReplicateEstimator method_estimator(const MethodConfig& config);

/// M_t maximum-likelihood estimate, with a degenerate interval.
ReplicateEstimator mt_estimator();

/// Replicate r draws its data from rng.derive(r).derive(0) and passes
/// rng.derive(r).derive(1) to the estimator. Replicates run on up to
/// `workers` threads and are collected in index order. Library errors in a
/// replicate mark it failed; it is then excluded from the aggregates.
StudyResult run_study(const PopulationSpec& spec, const ReplicateEstimator& estimator,
                      std::size_t n_reps, const RandomSource& rng, std::size_t workers = 1);

StudyResult run_study(const PopulationSpec& spec, const MethodConfig& config, std::size_t n_reps,
                      const RandomSource& rng, std::size_t workers = 1);

/// Aggregates records (in any order) into a StudyResult. Throws EmptySample
/// when every replicate failed.
StudyResult aggregate(const PopulationSpec& spec, std::vector<ReplicateRecord> records);

}  // namespace drs
