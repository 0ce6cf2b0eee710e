#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/special_functions/erf.hpp>

#include "cppok/stats.hpp"
#include "cppok/subordinator.hpp"

using namespace cppok;

namespace {

const MtssParams kRefMixture{0.6, 0.4, 0.5, 0.7, 1.0, 2.0};

// Empirical Laplace transform of `draws` at s, with its standard error.
SampleSummary laplace_at(const std::vector<double>& draws, double s) {
  std::vector<double> transformed;
  transformed.reserve(draws.size());
  for (double x : draws) transformed.push_back(std::exp(-s * x));
  return summarize(transformed);
}

}  // namespace

TEST_SUITE("subordinator") {

TEST_CASE("mixture parameter validation") {
  CHECK_NOTHROW(kRefMixture.validate());
  CHECK_THROWS_AS((MtssParams{0.6, 0.3, 0.5, 0.7, 1.0, 2.0}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((MtssParams{1.0, 0.0, 1.0, 0.5, 1.0, 0.0}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((MtssParams{1.0, 0.0, 0.5, 0.5, -1.0, 0.0}.validate()), std::invalid_argument);
  // An inactive component's parameters are ignored entirely.
  CHECK_NOTHROW((MtssParams{1.0, 0.0, 0.5, 7.0, 1.0, -3.0}.validate()));
  CHECK_FALSE(kRefMixture.has_zero_tempering());
  CHECK((MtssParams{1.0, 0.0, 0.5, 0.5, 0.0, 1.0}.has_zero_tempering()));
  CHECK(active_components(MtssParams{1.0, 0.0, 0.5, 0.5, 1.0, 0.0}).size() == 1);
  CHECK(active_components(kRefMixture).size() == 2);
}

TEST_CASE("transform exponent of the reference mixture at s = 1") {
  CHECK(laplace_exponent(kRefMixture, 0.0) == doctest::Approx(0.0));
  CHECK(laplace_exponent(kRefMixture, 1.0) ==
        doctest::Approx(0.46179393232870585).epsilon(1e-14));
  CHECK_THROWS_AS(laplace_exponent(kRefMixture, -1.0), std::invalid_argument);
}

TEST_CASE("mixture mean and variance rates carry their frozen values") {
  CHECK(mtss_mean_rate(kRefMixture) == doctest::Approx(0.52743067097974595).epsilon(1e-14));
  CHECK(mtss_variance_rate(kRefMixture) == doctest::Approx(0.18411460064696189).epsilon(1e-14));
  CHECK(mtss_mean(kRefMixture, 2.0) ==
        doctest::Approx(2.0 * 0.52743067097974595).epsilon(1e-14));
  CHECK(mtss_variance(kRefMixture, 3.0) ==
        doctest::Approx(3.0 * 0.18411460064696189).epsilon(1e-14));
}

TEST_CASE("moment operations refuse an untempered component") {
  const MtssParams pure{1.0, 0.0, 0.5, 0.5, 0.0, 1.0};
  CHECK_THROWS_AS(mtss_mean(pure, 1.0), std::domain_error);
  CHECK_THROWS_AS(mtss_variance(pure, 1.0), std::domain_error);
  CHECK_THROWS_AS(mtss_mean_rate(pure), std::domain_error);
  CHECK_THROWS_AS(inverse_mean_asymptote(pure), std::domain_error);
  CHECK_NOTHROW(laplace_exponent(pure, 2.0));  // the transform itself is fine
}

TEST_CASE("stable increments match their Laplace transform at five points") {
  for (double alpha : {0.3, 0.5, 0.8}) {
    const double dt = 1.0;
    const std::vector<double> draws = run_scalar_ensemble(
        [&](Rng& rng) { return sample_stable_increment(alpha, dt, rng); }, 200000,
        7001 + static_cast<std::uint64_t>(alpha * 10), 1);
    for (double x : {draws[0], draws[1], draws.back()}) CHECK(x > 0.0);
    for (double s : {0.5, 1.0, 2.0, 4.0, 8.0}) {
      const SampleSummary lt = laplace_at(draws, s);
      const double expected = std::exp(-dt * std::pow(s, alpha));
      CHECK(std::abs(lt.mean - expected) < 4.0 * lt.stderr_mean + 1e-12);
    }
  }
}

TEST_CASE("stable increments scale between window lengths like a power law") {
  const double alpha = 0.5;
  const double dt = 0.4;
  std::vector<double> doubled = run_scalar_ensemble(
      [&](Rng& rng) { return sample_stable_increment(alpha, 2.0 * dt, rng); }, 30000, 7101, 1);
  std::vector<double> scaled = run_scalar_ensemble(
      [&](Rng& rng) {
        return std::pow(2.0, 1.0 / alpha) * sample_stable_increment(alpha, dt, rng);
      },
      30000, 7102, 1);
  CHECK(two_sample_ks(doubled, scaled) < ks_critical_value(30000, 30000, 0.01));
}

TEST_CASE("stable increments over adjacent windows add up to the doubled window") {
  const double alpha = 0.7;
  const double dt = 0.6;
  std::vector<double> summed = run_scalar_ensemble(
      [&](Rng& rng) {
        return sample_stable_increment(alpha, dt, rng) + sample_stable_increment(alpha, dt, rng);
      },
      30000, 7201, 1);
  std::vector<double> direct = run_scalar_ensemble(
      [&](Rng& rng) { return sample_stable_increment(alpha, 2.0 * dt, rng); }, 30000, 7202, 1);
  CHECK(two_sample_ks(summed, direct) < ks_critical_value(30000, 30000, 0.01));
}

TEST_CASE("median of the half-stable increment matches the inverse-erfc value") {
  // At index 1/2 the unit increment has distribution function erfc(1/(2 sqrt(x))),
  // so the median solves erfc(1/(2 sqrt(x))) = 1/2.
  std::vector<double> draws = run_scalar_ensemble(
      [&](Rng& rng) { return sample_stable_increment(0.5, 1.0, rng); }, 200000, 7301, 1);
  std::nth_element(draws.begin(), draws.begin() + draws.size() / 2, draws.end());
  const double median = draws[draws.size() / 2];
  const double ei = boost::math::erfc_inv(0.5);
  CHECK(1.0 / (4.0 * ei * ei) == doctest::Approx(1.0990546691588662).epsilon(1e-14));
  CHECK(median == doctest::Approx(1.0990546691588662).epsilon(0.03));
}

TEST_CASE("zero-length windows contribute exactly zero") {
  Rng rng(7401);
  CHECK(sample_stable_increment(0.5, 0.0, rng) == 0.0);
  CHECK(sample_tempered_stable_increment(0.5, 1.0, 1.0, 0.0, rng) == 0.0);
  CHECK(sample_mtss_increment(kRefMixture, 0.0, rng) == 0.0);
}

TEST_CASE("tempered increments match their mean, variance, and transform") {
  const double alpha = 0.6, mu = 2.0, c = 1.0, dt = 1.5;
  const std::vector<double> draws = run_scalar_ensemble(
      [&](Rng& rng) { return sample_tempered_stable_increment(alpha, mu, c, dt, rng); }, 200000,
      7501, 1);
  const SampleSummary s = summarize(draws);
  const double mean = c * alpha * std::pow(mu, alpha - 1.0) * dt;
  const double var = c * alpha * (1.0 - alpha) * std::pow(mu, alpha - 2.0) * dt;
  CHECK(std::abs(s.mean - mean) < 5.0 * s.stderr_mean);
  CHECK(std::abs(s.variance - var) < 5.0 * s.stderr_variance);
  for (double sp : {0.5, 1.0, 2.0}) {
    const SampleSummary lt = laplace_at(draws, sp);
    const double expected =
        std::exp(-c * dt * (std::pow(sp + mu, alpha) - std::pow(mu, alpha)));
    CHECK(std::abs(lt.mean - expected) < 4.0 * lt.stderr_mean + 1e-12);
  }
}

TEST_CASE("tempered sampling stays unbiased when the window must be subdivided") {
  const double alpha = 0.5, mu = 1.5, c = 1.0, dt = 40.0;
  const std::vector<double> draws = run_scalar_ensemble(
      [&](Rng& rng) { return sample_tempered_stable_increment(alpha, mu, c, dt, rng); }, 20000,
      7601, 1);
  const SampleSummary s = summarize(draws);
  const double mean = c * alpha * std::pow(mu, alpha - 1.0) * dt;
  const double var = c * alpha * (1.0 - alpha) * std::pow(mu, alpha - 2.0) * dt;
  CHECK(std::abs(s.mean - mean) < 5.0 * s.stderr_mean);
  CHECK(std::abs(s.variance - var) < 5.0 * s.stderr_variance);
}

TEST_CASE("mixture increments combine both components") {
  const std::vector<double> draws = run_scalar_ensemble(
      [&](Rng& rng) { return sample_mtss_increment(kRefMixture, 1.0, rng); }, 200000, 7701, 1);
  const SampleSummary s = summarize(draws);
  CHECK(std::abs(s.mean - mtss_mean(kRefMixture, 1.0)) < 5.0 * s.stderr_mean);
  CHECK(std::abs(s.variance - mtss_variance(kRefMixture, 1.0)) < 5.0 * s.stderr_variance);
  const SampleSummary lt = laplace_at(draws, 1.0);
  CHECK(std::abs(lt.mean - std::exp(-laplace_exponent(kRefMixture, 1.0))) <
        4.0 * lt.stderr_mean);
}

TEST_CASE("subordinator paths start at zero and increase strictly") {
  Rng rng(7801);
  const SubordinatorPath path =
      sample_mtss_path(kRefMixture, {0.0, 0.5, 1.0, 1.0, 2.5}, rng);
  REQUIRE(path.values.size() == 5);
  CHECK(path.values[0] == 0.0);
  CHECK(path.values[1] > 0.0);
  CHECK(path.values[2] > path.values[1]);
  CHECK(path.values[3] == path.values[2]);  // zero-length interval
  CHECK(path.values[4] > path.values[3]);
  CHECK_THROWS_AS(sample_mtss_path(kRefMixture, {1.0, 0.5}, rng), std::invalid_argument);
  CHECK_THROWS_AS(sample_mtss_path(kRefMixture, {-1.0, 0.5}, rng), std::invalid_argument);
  CHECK_THROWS_AS(sample_mtss_path(kRefMixture, {}, rng), std::invalid_argument);
}

TEST_CASE("first-passage values sit on the lattice and bracket the query times") {
  Rng rng(7901);
  const double step = 0.05;
  PassageBrackets brackets;
  const InversePath inv =
      sample_inverse_path(kRefMixture, {0.0, 0.3, 1.7, 1.7, 4.0}, step, rng, &brackets);
  CHECK(inv.bias_bound == step);
  REQUIRE(inv.values.size() == 5);
  REQUIRE(brackets.s_below.size() == 5);
  double prev = 0.0;
  for (std::size_t i = 0; i < inv.values.size(); ++i) {
    const double e = inv.values[i];
    CHECK(e > 0.0);
    CHECK(e >= prev);
    // Lattice membership: e is an integer multiple of the spacing.
    const double ratio = e / step;
    CHECK(std::abs(ratio - std::round(ratio)) < 1e-9);
    // The subordinator straddles the query time across the reported passage.
    CHECK(brackets.s_below[i] <= inv.grid[i]);
    CHECK(brackets.s_at[i] > inv.grid[i]);
    prev = e;
  }
  // At t = 0 the first lattice point already passes, so the value is one step.
  CHECK(inv.values[0] == doctest::Approx(step));
  // Repeated query times get identical passage values.
  CHECK(inv.values[2] == inv.values[3]);
}

TEST_CASE("first-passage sampling reports an exhausted operational-time budget") {
  Rng rng(7902);
  CHECK_THROWS_AS(sample_inverse_path(kRefMixture, {1000.0}, 0.001, rng, nullptr, 5),
                  std::runtime_error);
}

TEST_CASE("inverse step rule and long-run asymptote") {
  const MtssParams half{1.0, 0.0, 0.5, 0.5, 1.0, 0.0};  // mean rate 1/2
  CHECK(inverse_mean_asymptote(half) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(default_inverse_step(half, 50.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(default_inverse_step(half, 0.0), std::invalid_argument);
}

TEST_CASE("simulated first-passage moments match the renewal expansion") {
  // Single tempered component, index 1/2, tempering 1: drift 1/2, dispersion 1/4.
  // E[E(t)] -> 2t + 1/2 and Var[E(t)] -> 2t for large t.
  const MtssParams half{1.0, 0.0, 0.5, 0.5, 1.0, 0.0};
  const InverseMomentTable table =
      inverse_moment_table(half, {20.0, 40.0}, 0.2, 4000, 7903, 1);
  CHECK(table.bias_bound == doctest::Approx(0.2));
  const double mean40 = table.mean_at(40.0);
  const double var40 = table.variance_at(40.0);
  CHECK(std::abs(mean40 - 80.5) < 4.0 * table.se_mean_at(40.0) + 0.25);
  CHECK(std::abs(var40 / 80.0 - 1.0) < 0.15);
  const double mean20 = table.mean_at(20.0);
  CHECK(std::abs(mean20 - 40.5) < 4.0 * table.se_mean_at(20.0) + 0.25);
  // Covariance lookup is symmetric and the table refuses unknown times.
  CHECK(table.cov_at(20.0, 40.0) == table.cov_at(40.0, 20.0));
  CHECK(table.cov_at(20.0, 40.0) > 0.0);
  CHECK_THROWS_AS(table.mean_at(30.0), std::invalid_argument);
}

}  // TEST_SUITE
