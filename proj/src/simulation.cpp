#include "drs/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include <boost/random/binomial_distribution.hpp>

#include "drs/diagnostics.hpp"
#include "drs/error.hpp"

namespace drs {
namespace {

std::int64_t binomial(std::int64_t trials, double prob, RandomSource& rng) {
  if (trials <= 0 || prob <= 0.0) return 0;
  if (prob >= 1.0) return trials;
  boost::random::binomial_distribution<std::int64_t, double> dist(trials, prob);
  return dist(rng);
}

double sorted_mean(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

}  // namespace

const std::vector<PopulationSpec>& builtin_populations() {
  static const std::vector<PopulationSpec> populations{
      {"P1", 500, 1.25, 0.50, 0.65}, {"P2", 500, 1.25, 0.60, 0.70},
      {"P3", 500, 1.25, 0.80, 0.70}, {"P4", 500, 1.25, 0.70, 0.55},
      {"P5", 500, 0.80, 0.50, 0.65}, {"P6", 500, 0.80, 0.60, 0.70},
      {"P7", 500, 0.80, 0.80, 0.70}, {"P8", 500, 0.80, 0.70, 0.55},
  };
  return populations;
}

std::optional<PopulationSpec> find_population(std::string_view name) {
  for (const auto& spec : builtin_populations()) {
    if (spec.name == name) return spec;
  }
  return std::nullopt;
}

void validate_population(const PopulationSpec& spec) {
  if (spec.n_true < 1) fail(ErrorCode::DomainError, "population size must be positive");
  if (!(spec.phi > 0.0)) fail(ErrorCode::DomainError, "phi must be positive");
  p_from_marginals(spec.p1, spec.p_dot1, spec.phi);
}

CellProbs population_cells(const PopulationSpec& spec) {
  validate_population(spec);
  return cell_probs(spec.p1, p_from_marginals(spec.p1, spec.p_dot1, spec.phi), spec.phi);
}

double expected_x0(const PopulationSpec& spec) {
  return static_cast<double>(spec.n_true) * (1.0 - population_cells(spec).p00);
}

DrsTable generate_dataset(const PopulationSpec& spec, RandomSource& rng) {
  const CellProbs cells = population_cells(spec);
  // Multinomial by sequential conditional binomials.
  DrsTable t;
  std::int64_t remaining = spec.n_true;
  double rest = 1.0;
  t.x11 = binomial(remaining, cells.p11 / rest, rng);
  remaining -= t.x11;
  rest -= cells.p11;
  t.x10 = binomial(remaining, rest > 0.0 ? cells.p10 / rest : 0.0, rng);
  remaining -= t.x10;
  rest -= cells.p10;
  t.x01 = binomial(remaining, rest > 0.0 ? cells.p01 / rest : 0.0, rng);
  return t;
}

ReplicateEstimator method_estimator(const MethodConfig& config) {
  return [config](const DrsTable& table, const RandomSource& rng) {
    const EstimationOutcome outcome = estimate(table, config, rng);
    const Summary s = summarize(outcome.n_draws);
    return ReplicateEstimate{s.mean, s.ci_low, s.ci_high, outcome.converged};
  };
}

ReplicateEstimator mt_estimator() {
  return [](const DrsTable& table, const RandomSource&) {
    const double n_hat = mt_mle(table).n_hat;
    return ReplicateEstimate{n_hat, n_hat, n_hat, true};
  };
}

StudyResult run_study(const PopulationSpec& spec, const ReplicateEstimator& estimator,
                      std::size_t n_reps, const RandomSource& rng, std::size_t workers) {
  if (n_reps < 2) fail(ErrorCode::DomainError, "a study needs at least two replicates");
  validate_population(spec);

  std::vector<ReplicateRecord> records(n_reps);
  std::atomic<std::size_t> next{0};
  std::exception_ptr fatal;
  std::mutex fatal_mutex;

  auto worker = [&] {
    for (std::size_t r = next++; r < n_reps; r = next++) {
      ReplicateRecord& rec = records[r];
      rec.index = r;
      try {
        const RandomSource replicate = rng.derive(r);
        RandomSource data_stream = replicate.derive(0);
        rec.table = generate_dataset(spec, data_stream);
        validate_table(rec.table.x11, rec.table.x10, rec.table.x01);
        rec.result = estimator(rec.table, replicate.derive(1));
      } catch (const Error& e) {
        rec.failed = true;
        rec.error = e.what();
      } catch (...) {
        std::lock_guard lock(fatal_mutex);
        if (!fatal) fatal = std::current_exception();
        next = n_reps;
      }
    }
  };

  const std::size_t threads = std::clamp<std::size_t>(workers, 1, n_reps);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
  }
  if (fatal) std::rethrow_exception(fatal);
  return aggregate(spec, std::move(records));
}

StudyResult run_study(const PopulationSpec& spec, const MethodConfig& config, std::size_t n_reps,
                      const RandomSource& rng, std::size_t workers) {
  validate_config(config);
  return run_study(spec, method_estimator(config), n_reps, rng, workers);
}

StudyResult aggregate(const PopulationSpec& spec, std::vector<ReplicateRecord> records) {
  std::sort(records.begin(), records.end(),
            [](const auto& a, const auto& b) { return a.index < b.index; });
  StudyResult out;
  out.spec = spec;
  out.n_reps = records.size();

  std::vector<double> estimates;
  std::vector<double> lows;
  std::vector<double> highs;
  std::vector<double> sq_errors;
  std::size_t covered = 0;
  const auto truth = static_cast<double>(spec.n_true);
  for (const auto& rec : records) {
    if (rec.failed) {
      ++out.failed;
      continue;
    }
    if (!rec.result.converged) ++out.not_converged;
    estimates.push_back(rec.result.estimate);
    lows.push_back(rec.result.ci_low);
    highs.push_back(rec.result.ci_high);
    sq_errors.push_back((rec.result.estimate - truth) * (rec.result.estimate - truth));
    if (rec.result.ci_low <= truth && truth <= rec.result.ci_high) ++covered;
  }
  if (estimates.empty()) fail(ErrorCode::EmptySample, "every replicate failed");

  const Summary s = summarize(estimates);
  out.mean_estimate = s.mean;
  out.sample_se = s.se;
  out.rmse = std::sqrt(sorted_mean(sq_errors));
  out.coverage_pct = 100.0 * static_cast<double>(covered) / static_cast<double>(estimates.size());
  out.ci_low = sorted_mean(lows);
  out.ci_high = sorted_mean(highs);
  out.records = std::move(records);
  return out;
}

}  // namespace drs
