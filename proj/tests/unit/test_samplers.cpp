#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include <boost/math/special_functions/beta.hpp>

#include "drs/error.hpp"
#include "drs/samplers.hpp"
#include "expect_error.hpp"
#include "oracles.hpp"

using namespace drs;
using oracle::code_of;

namespace {

constexpr int kDraws = 100000;
const double kInf = std::numeric_limits<double>::infinity();

}  // namespace

TEST_SUITE("samplers") {
  TEST_CASE("sample_x00 with mu = 1 is degenerate at zero") {
    RandomSource rng(3);
    for (int i = 0; i < 1000; ++i) REQUIRE(sample_x00(60, 1.0, rng) == 0);
  }

  TEST_CASE("sample_x00 matches the enumerated posterior of x00") {
    const std::int64_t x0 = 60;
    const double mu = 0.8;
    // Posterior of N = x0 + k under pi(N) = 1/N: (N-1)!/(N-x0)! (1-mu)^k.
    const int kmax = 200;
    std::vector<double> mass(kmax + 1);
    double total = 0.0;
    for (int k = 0; k <= kmax; ++k) {
      const double n = static_cast<double>(x0 + k);
      mass[k] = std::exp(std::lgamma(n) - std::lgamma(n - x0 + 1.0) + k * std::log(1.0 - mu) -
                         std::lgamma(static_cast<double>(x0)));
      total += mass[k];
    }
    for (double& m : mass) m /= total;

    RandomSource rng(11);
    std::vector<double> freq(kmax + 1, 0.0);
    std::vector<double> draws;
    double outside = 0.0;
    for (int i = 0; i < kDraws; ++i) {
      const auto k = sample_x00(x0, mu, rng);
      REQUIRE(k >= 0);
      draws.push_back(static_cast<double>(k));
      if (k <= kmax) {
        freq[k] += 1.0 / kDraws;
      } else {
        outside += 1.0 / kDraws;
      }
    }
    double tv = outside;
    for (int k = 0; k <= kmax; ++k) tv += std::abs(freq[k] - mass[k]);
    tv *= 0.5;
    CHECK(tv < 0.02);

    const double expected = x0 * (1.0 - mu) / mu;
    const double se = std::sqrt(x0 * (1.0 - mu) / (mu * mu) / kDraws);
    CHECK(std::abs(oracle::mean_of(draws) - expected) < 3.0 * se);
    CHECK(code_of([&] { sample_x00(0, 0.5, rng); }) == ErrorCode::DomainError);
    CHECK(code_of([&] { sample_x00(10, 0.0, rng); }) == ErrorCode::DomainError);
  }

  TEST_CASE("sample_p1 is the Beta conditional") {
    RandomSource rng(5);
    std::vector<double> draws;
    for (int i = 0; i < kDraws; ++i) draws.push_back(sample_p1(50, 100, rng));
    const double ks = oracle::ks_statistic(draws, [](double x) { return boost::math::ibeta(51.0, 51.0, x); });
    CHECK(ks < 0.01);

    std::vector<double> edge;
    for (int i = 0; i < 20000; ++i) edge.push_back(sample_p1(20, 20, rng));
    const double sd = std::sqrt(21.0 / (22.0 * 22.0 * 23.0));
    CHECK(std::abs(oracle::mean_of(edge) - 21.0 / 22.0) < 3.0 * sd / std::sqrt(20000.0));
    CHECK(code_of([&] { sample_p1(101, 100, rng); }) == ErrorCode::DomainError);
  }

  TEST_CASE("sample_p_ars with x10 = 0 is a truncated Beta") {
    const auto t = validate_table(181, 0, 144);
    const std::int64_t n = 500;
    const double phi = 1.25;
    const double a = t.xdot1() + 1.0;
    const double b = static_cast<double>(n - t.x0()) + 1.0;
    const double upper = 1.0 / phi;
    const double norm = boost::math::ibeta(a, b, upper);
    RandomSource rng(21);
    std::vector<double> draws;
    for (int i = 0; i < kDraws; ++i) draws.push_back(sample_p_ars(n, phi, t, rng));
    const double ks = oracle::ks_statistic(
        draws, [&](double x) { return boost::math::ibeta(a, b, std::min(x, upper)) / norm; });
    CHECK(ks < 0.01);
  }

  TEST_CASE("sample_p_ars matches a grid CDF") {
    const auto t = validate_table(181, 69, 144);
    const std::int64_t n = 500;
    const double phi = 1.25;
    const oracle::GridCdf cdf(
        [&](double p) {
          return t.xdot1() * std::log(p) + static_cast<double>(n - t.x0()) * std::log1p(-p) +
                 t.x10 * std::log1p(-phi * p);
        },
        0.0, 1.0 / phi, 100000);
    RandomSource rng(22);
    PConditionalSampler sampler(n, phi, t);
    std::vector<double> draws;
    for (int i = 0; i < kDraws; ++i) {
      const double p = sampler.draw(rng);
      REQUIRE(p > 0.0);
      REQUIRE(p < 1.0 / phi);
      draws.push_back(p);
    }
    CHECK(oracle::ks_statistic(draws, cdf) < 0.01);
  }

  TEST_CASE("ARS envelope is valid and efficient") {
    const auto t = validate_table(181, 69, 144);
    PConditionalSampler sampler(500, 1.25, t);
    RandomSource rng(23);
    for (int i = 0; i < 10000; ++i) sampler.draw(rng);
    WARN(sampler.acceptance_rate() > 0.5);
    MESSAGE("ARS acceptance rate over 1e4 draws: " << sampler.acceptance_rate());

    const auto& env = sampler.envelope();
    REQUIRE(env.abscissae.size() >= 3);
    for (std::size_t i = 0; i < env.abscissae.size(); ++i) {
      const double x = env.abscissae[i];
      CHECK(x > 0.0);
      CHECK(x < sampler.support_upper());
      if (i > 0) CHECK(env.abscissae[i - 1] < x);
      // Every tangent dominates the log-density.
      for (int k = 1; k < 400; ++k) {
        const double y = sampler.support_upper() * k / 400.0;
        CHECK(env.log_density[i] + env.derivative[i] * (y - x) >= sampler.log_density(y) - 1e-9);
      }
    }
  }

  TEST_CASE("sample_phi matches a grid CDF") {
    const double p = 0.58;
    const auto prior = PhiPrior::flat(1.0, kInf);
    const oracle::GridCdf cdf(
        [&](double phi) { return 181.0 * std::log(phi) + 69.0 * std::log1p(-p * phi); }, 1.0, 1.0 / p,
        100000);
    RandomSource rng(31);
    std::vector<double> draws;
    for (int i = 0; i < kDraws; ++i) {
      const double phi = sample_phi(181, 69, p, prior, rng);
      REQUIRE(phi >= 1.0);
      REQUIRE(phi < 1.0 / p);
      draws.push_back(phi);
    }
    CHECK(oracle::ks_statistic(draws, cdf) < 0.01);
  }

  TEST_CASE("sample_phi reduced and infeasible cases") {
    RandomSource rng(32);
    const double p = 0.4;
    std::vector<double> draws;
    for (int i = 0; i < 20000; ++i) draws.push_back(sample_phi(0, 0, p, PhiPrior::gen_beta_one(1, 1), rng));
    const double sd = (1.0 / p) / std::sqrt(12.0);
    CHECK(std::abs(oracle::mean_of(draws) - 1.0 / (2.0 * p)) < 3.0 * sd / std::sqrt(20000.0));
    CHECK(code_of([&] { sample_phi(30, 20, 0.6, PhiPrior::flat(2, 3), rng); }) == ErrorCode::EmptyTruncation);
  }

  TEST_CASE("sample_phi draws respect the prior interval and the live bound") {
    RandomSource rng(33);
    for (double p : {0.2, 0.45, 0.7, 0.95}) {
      for (const auto& prior : {PhiPrior::flat(0.5, 2.0), PhiPrior::flat(0.9, 1.1), PhiPrior::gen_beta_one(2, 3)}) {
        const auto [lo, hi] = prior.bounds();
        if (std::min(hi, 1.0 / p) <= lo) continue;
        for (int i = 0; i < 500; ++i) {
          const double phi = sample_phi(40, 25, p, prior, rng);
          REQUIRE(phi >= lo);
          REQUIRE(phi <= hi);
          REQUIRE(phi * p < 1.0);
        }
      }
    }
  }

  TEST_CASE("truncated Beta routes agree with the exact CDF") {
    struct Case {
      double a, b, lo, hi;
    };
    for (const Case& c : {Case{5, 8, 0.1, 0.9}, Case{200, 60, 0.5, 0.7}, Case{200, 60, 0.85, 0.99}}) {
      const TruncatedBeta tb(c.a, c.b, c.lo, c.hi);
      const double f_lo = boost::math::ibeta(c.a, c.b, c.lo);
      const double f_hi = boost::math::ibeta(c.a, c.b, c.hi);
      auto cdf = [&](double x) { return (boost::math::ibeta(c.a, c.b, x) - f_lo) / (f_hi - f_lo); };
      RandomSource rng(41);
      std::vector<double> mixed;
      std::vector<double> inverted;
      for (int i = 0; i < 20000; ++i) {
        mixed.push_back(tb.draw(rng));
        inverted.push_back(tb.draw_by_inversion(rng));
      }
      CHECK(oracle::ks_statistic(mixed, cdf) < 0.015);
      CHECK(oracle::ks_statistic(inverted, cdf) < 0.015);
      for (double x : inverted) REQUIRE((x >= c.lo && x <= c.hi));
    }
    CHECK(code_of([] { TruncatedBeta(2, 2, 0.5, 0.5); }) == ErrorCode::EmptyTruncation);
    CHECK(code_of([] { TruncatedBeta(0, 2, 0.1, 0.5); }) == ErrorCode::DomainError);
  }

  TEST_CASE("samplers are deterministic per seed") {
    const auto t = validate_table(181, 69, 144);
    auto run = [&] {
      RandomSource rng(77, 4);
      std::vector<double> out;
      for (int i = 0; i < 200; ++i) {
        out.push_back(static_cast<double>(sample_x00(60, 0.7, rng)));
        out.push_back(sample_p1(50, 90, rng));
        out.push_back(sample_p_ars(500, 1.25, t, rng));
        out.push_back(sample_phi(181, 69, 0.58, PhiPrior::flat(1.0, kInf), rng));
      }
      return out;
    };
    CHECK(run() == run());
  }

  TEST_CASE("PhiPrior validation and description") {
    CHECK(code_of([] { PhiPrior::flat(2, 1); }) == ErrorCode::DomainError);
    CHECK(code_of([] { PhiPrior::flat(-1, 1); }) == ErrorCode::DomainError);
    CHECK(code_of([] { PhiPrior::gen_beta_one(-1, 1); }) == ErrorCode::DomainError);
    CHECK(PhiPrior::flat(1, 2).describe() == "U(1,2)");
    CHECK(PhiPrior::flat(1, kInf).describe() == "U(1,1/p)");
    CHECK(PhiPrior::gen_beta_one(1, 1).describe() == "GB-I(1,1,p)");
  }
}
