#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "cppok/orderk.hpp"
#include "cppok/stats.hpp"

using namespace cppok;

namespace {

// Dense pmf of the n-fold sum of an integer law, by naive convolution.
std::vector<double> naive_fold(const std::vector<double>& q, int fold) {
  std::vector<double> cur{1.0};
  for (int i = 0; i < fold; ++i) {
    std::vector<double> next(cur.size() + q.size() - 1, 0.0);
    for (std::size_t a = 0; a < cur.size(); ++a) {
      for (std::size_t b = 0; b < q.size(); ++b) next[a + b] += cur[a] * q[b];
    }
    cur = std::move(next);
  }
  return cur;
}

// A continuous jump law with no closed-form convolution: Uniform(0,1).
class UniformJump final : public JumpLaw {
 public:
  double sample(Rng& rng) const override { return uniform_open01(rng); }
  double mean() const override { return 0.5; }
  double second_moment() const override { return 1.0 / 3.0; }
  std::string describe() const override { return "uniform(0,1)"; }
};

}  // namespace

TEST_SUITE("orderk") {

TEST_CASE("counting pmf recursion reproduces hand-enumerated order-2 values") {
  const OrderKParams params{2, 1.0};
  const PokPmfTable table = pok_pmf(params, 1.0, 2);
  // Order 2, unit rate and time: p0 = e^{-2}; one count needs one batch of
  // size 1; two counts come from one batch of size 2 or two of size 1.
  CHECK(table.probs[0] == doctest::Approx(0.13533528323661269).epsilon(1e-15));
  CHECK(table.probs[1] == doctest::Approx(0.13533528323661269).epsilon(1e-15));
  CHECK(table.probs[2] == doctest::Approx(0.20300292485491904).epsilon(1e-15));
}

TEST_CASE("order 1 collapses to the Poisson distribution") {
  const OrderKParams params{1, 1.0};
  const PokPmfTable table = pok_pmf(params, 1.0, 3);
  CHECK(table.probs[0] == doctest::Approx(0.36787944117144232).epsilon(1e-15));
  CHECK(table.probs[1] == doctest::Approx(0.36787944117144232).epsilon(1e-15));
  CHECK(table.probs[2] == doctest::Approx(0.18393972058572116).epsilon(1e-15));
  CHECK(table.probs[3] == doctest::Approx(0.061313240195240387).epsilon(1e-15));
}

TEST_CASE("pmf at time zero is a point mass at zero") {
  const PokPmfTable table = pok_pmf({3, 2.0}, 0.0, 4);
  CHECK(table.probs[0] == 1.0);
  for (int n = 1; n <= 4; ++n) CHECK(table.probs[static_cast<std::size_t>(n)] == 0.0);
}

TEST_CASE("recursion agrees with direct enumeration over compositions") {
  for (int k : {1, 2, 3, 4}) {
    for (double lt : {0.5, 2.0}) {
      const OrderKParams params{k, lt};
      const PokPmfTable table = pok_pmf(params, 1.0, 25);
      for (int n = 0; n <= 25; ++n) {
        const double exact = pok_pmf_enum(params, 1.0, n);
        CHECK(std::abs(table.probs[static_cast<std::size_t>(n)] - exact) < 1e-12);
      }
    }
  }
}

TEST_CASE("enumeration refuses to exceed its composition budget") {
  CHECK_THROWS_AS(pok_pmf_enum({4, 2.0}, 1.0, 60, 10), std::runtime_error);
}

TEST_CASE("auto-sized table captures all but the requested tail mass") {
  const PokPmfTable table = pok_pmf_auto({5, 4.0}, 1.0, 1e-10);
  CHECK(table.tail_mass() < 1e-10);
  double total = 0.0;
  for (double p : table.probs) {
    CHECK(p >= 0.0);
    total += p;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("parameter validation rejects bad order, rate, and time") {
  CHECK_THROWS_AS((OrderKParams{0, 1.0}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((OrderKParams{2, 0.0}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((OrderKParams{2, -1.0}.validate()), std::invalid_argument);
  CHECK_THROWS_AS(pok_pmf({2, 1.0}, -0.5, 3), std::invalid_argument);
}

TEST_CASE("jump-law constructors validate their parameters") {
  CHECK_THROWS_AS(ExponentialJump(0.0), std::invalid_argument);
  CHECK_THROWS_AS(DiscreteJump({}), std::invalid_argument);
  CHECK_THROWS_AS(DiscreteJump({0.5, 0.4}), std::invalid_argument);   // sums to 0.9
  CHECK_THROWS_AS(DiscreteJump({1.5, -0.5}), std::invalid_argument);  // negative weight
}

TEST_CASE("discrete law trims trailing zero weights from its support") {
  const DiscreteJump law({0.25, 0.75, 0.0, 0.0});
  REQUIRE(law.integer_pmf() != nullptr);
  CHECK(law.integer_pmf()->size() == 2);
  CHECK(law.mean() == doctest::Approx(0.75));
  CHECK(law.second_moment() == doctest::Approx(0.75));
}

TEST_CASE("closed-form bulk sums match their definitions") {
  Rng rng(20250101);
  const DiracJump dirac(2.5);
  CHECK(dirac.sum_sample(rng, 7) == 7 * 2.5);
  CHECK(dirac.sum_sample(rng, 0) == 0.0);

  // Exponential: sum of n rate-2 draws has mean n/2 and variance n/4.
  const ExponentialJump expo(2.0);
  std::vector<double> sums;
  for (int i = 0; i < 2000; ++i) sums.push_back(expo.sum_sample(rng, 100));
  const SampleSummary s = summarize(sums);
  CHECK(std::abs(s.mean - 50.0) < 5.0 * s.stderr_mean);
  CHECK(std::abs(s.variance - 25.0) < 5.0 * s.stderr_variance);
}

TEST_CASE("discrete bulk sum switches to a multinomial draw for huge counts") {
  Rng rng(20250102);
  const DiscreteJump law({0.2, 0.5, 0.3});  // mean 1.1, variance 0.49
  const std::int64_t n = 50000;
  std::vector<double> sums;
  for (int i = 0; i < 2000; ++i) sums.push_back(law.sum_sample(rng, n));
  const SampleSummary s = summarize(sums);
  CHECK(std::abs(s.mean - 1.1 * static_cast<double>(n)) < 5.0 * s.stderr_mean);
  CHECK(std::abs(s.variance - 0.49 * static_cast<double>(n)) < 5.0 * s.stderr_variance);
}

TEST_CASE("compound moments match the closed forms") {
  // Order 2, rate 2, unit time, jumps fixed at 2: mean 3*2*2, variance
  // 3*2*0 + 5*2*4.
  const DiracJump d2(2.0);
  CHECK(cppok_mean({2, 2.0}, d2, 1.0) == doctest::Approx(12.0).epsilon(1e-15));
  CHECK(cppok_variance({2, 2.0}, d2, 1.0) == doctest::Approx(40.0).epsilon(1e-15));

  // Order 3, rate 0.5, time 2, exponential(2) jumps: prefactor 6, mean 3;
  // variance 6*(1/4) + 14*(1/4).
  const ExponentialJump e2(2.0);
  CHECK(cppok_mean({3, 0.5}, e2, 2.0) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(cppok_variance({3, 0.5}, e2, 2.0) == doctest::Approx(5.0).epsilon(1e-14));
}

TEST_CASE("simulated moments of the compound increment match the closed forms") {
  const OrderKParams params{3, 1.0};
  const ExponentialJump law(2.0);
  const double dt = 0.7;
  std::vector<double> draws = run_scalar_ensemble(
      [&](Rng& rng) { return sample_cppok_increment(params, law, dt, rng); }, 200000, 91101, 1);
  const SampleSummary s = summarize(draws);
  CHECK(std::abs(s.mean - cppok_mean(params, law, dt)) < 4.0 * s.stderr_mean);
  CHECK(std::abs(s.variance - cppok_variance(params, law, dt)) < 4.0 * s.stderr_variance);
}

TEST_CASE("window increment and event path value agree in distribution") {
  const OrderKParams params{2, 1.5};
  const ExponentialJump law(1.0);
  const double dt = 0.7;
  std::vector<double> a = run_scalar_ensemble(
      [&](Rng& rng) { return sample_cppok_increment(params, law, dt, rng); }, 50000, 91201, 1);
  std::vector<double> b = run_scalar_ensemble(
      [&](Rng& rng) {
        return path_value_at(sample_cppok_path(params, law, dt, rng), dt);
      },
      50000, 91202, 1);
  CHECK(two_sample_ks(a, b) < ks_critical_value(a.size(), b.size(), 0.01));
}

TEST_CASE("counting paths take batch steps between 1 and the order") {
  Rng rng(20250103);
  const OrderKParams params{4, 2.0};
  const ProcessPath path = sample_ppok_path(params, 5.0, rng);
  CHECK(path.horizon == 5.0);
  double prev_value = 0.0;
  double prev_time = 0.0;
  for (std::size_t i = 0; i < path.times.size(); ++i) {
    CHECK(path.times[i] > prev_time);
    CHECK(path.times[i] <= 5.0);
    const double step = path.values[i] - prev_value;
    CHECK(step >= 1.0);
    CHECK(step <= 4.0);
    CHECK(step == std::floor(step));
    prev_time = path.times[i];
    prev_value = path.values[i];
  }
}

TEST_CASE("path evaluation is right-continuous with left limits") {
  ProcessPath path;
  path.times = {1.0, 2.0};
  path.values = {3.0, 5.0};
  path.horizon = 4.0;
  CHECK(path_value_at(path, 0.0) == 0.0);
  CHECK(path_value_at(path, 0.999) == 0.0);
  CHECK(path_value_at(path, 1.0) == 3.0);  // value at the event time includes the jump
  CHECK(path_value_at(path, 1.5) == 3.0);
  CHECK(path_value_at(path, 2.0) == 5.0);
  CHECK(path_value_at(path, 4.0) == 5.0);
}

TEST_CASE("dispersion of the pure counting process") {
  // Order 1 with unit jumps is Poisson: variance equals mean exactly.
  const DiracJump unit(1.0);
  const DispersionReport r1 = dispersion_report({1, 1.0}, unit, 1.0);
  CHECK(r1.gap == 0.0);
  CHECK(r1.classification == Dispersion::equi);
  // Any higher order with unit jumps is overdispersed.
  const DispersionReport r2 = dispersion_report({2, 1.0}, unit, 1.0);
  CHECK(r2.classification == Dispersion::over);
  CHECK(r2.gap == doctest::Approx(r2.prefactor * 2.0 / 3.0));
}

TEST_CASE("dispersion trichotomy for exponential jumps crosses at rate 2k/3 + 4/3") {
  const OrderKParams k1{1, 1.0};
  // Rate 1: mean 1, second moment 2 -> gap = prefactor * (2 - 1) = 1.
  const DispersionReport over = dispersion_report(k1, ExponentialJump(1.0), 1.0);
  CHECK(over.classification == Dispersion::over);
  CHECK(over.gap == doctest::Approx(1.0).epsilon(1e-15));
  // Rate exactly 2 at order 1: 2/rate^2 - 1/rate = 0 in exact arithmetic.
  const DispersionReport equi = dispersion_report(k1, ExponentialJump(2.0), 1.0);
  CHECK(equi.gap == 0.0);
  CHECK(equi.classification == Dispersion::equi);
  const DispersionReport under = dispersion_report(k1, ExponentialJump(4.0), 1.0);
  CHECK(under.classification == Dispersion::under);
  CHECK(under.gap < 0.0);

  // Order 2: the crossing moves to rate 8/3.
  const OrderKParams k2{2, 1.0};
  const double rc = 8.0 / 3.0;
  CHECK(dispersion_report(k2, ExponentialJump(rc * (1.0 - 1e-3)), 1.0).classification ==
        Dispersion::over);
  CHECK(dispersion_report(k2, ExponentialJump(rc * (1.0 + 1e-3)), 1.0).classification ==
        Dispersion::under);
  CHECK(std::abs(dispersion_report(k2, ExponentialJump(rc), 1.0).gap) < 1e-12);
}

TEST_CASE("small fixed jumps can underdisperse an order-1 process") {
  const DispersionReport r = dispersion_report({1, 1.0}, DiracJump(0.5), 1.0);
  CHECK(r.classification == Dispersion::under);
  CHECK(r.gap == doctest::Approx(-0.25).epsilon(1e-15));
}

TEST_CASE("dispersion report decomposes the gap into its three terms") {
  const ExponentialJump law(1.0);
  const DispersionReport r = dispersion_report({3, 2.0}, law, 0.5);
  CHECK(r.prefactor == doctest::Approx(6.0));  // k(k+1)/2 * rate * t
  CHECK(r.second_moment_term == doctest::Approx(law.second_moment()));
  CHECK(r.mean_term == doctest::Approx(-law.mean()));
  CHECK(r.batch_term == doctest::Approx((7.0 / 3.0 - 1.0) * law.mean() * law.mean()));
  CHECK(r.gap ==
        doctest::Approx(r.prefactor * (r.second_moment_term + r.mean_term + r.batch_term)));
  CHECK_THROWS_AS(dispersion_report({3, 2.0}, law, 0.0), std::invalid_argument);
}

TEST_CASE("generating function: boundary, frozen value, and mean recovery") {
  const OrderKParams params{2, 1.0};
  const DiracJump unit(1.0);
  CHECK(cppok_pgf(params, unit, 1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
  // At u = 1/2 the exponent is (1/2 - 1) + (1/4 - 1) = -5/4.
  CHECK(cppok_pgf(params, unit, 0.5, 1.0) ==
        doctest::Approx(0.2865047968601901).epsilon(1e-14));
  // One-sided second-order difference at u = 1 recovers the mean.
  const double h = 1e-6;
  const double deriv = (3.0 * cppok_pgf(params, unit, 1.0, 1.0) -
                        4.0 * cppok_pgf(params, unit, 1.0 - h, 1.0) +
                        cppok_pgf(params, unit, 1.0 - 2.0 * h, 1.0)) /
                       (2.0 * h);
  CHECK(deriv == doctest::Approx(cppok_mean(params, unit, 1.0)).epsilon(1e-4));
}

TEST_CASE("generating function with a mixed-weight integer law") {
  // Order 1, rate 2, t = 0.7, jumps 0/1 with equal weight: exponent is
  // 1.4 * ((0.5 + 0.5u) - 1) = -0.49 at u = 0.3.
  const DiscreteJump law({0.5, 0.5});
  CHECK(cppok_pgf({1, 2.0}, law, 0.3, 0.7) ==
        doctest::Approx(0.61262639418441607).epsilon(1e-14));
}

TEST_CASE("generating function rejects bad arguments and non-integer laws") {
  const DiracJump unit(1.0);
  CHECK_THROWS_AS(cppok_pgf({2, 1.0}, unit, -0.1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(cppok_pgf({2, 1.0}, unit, 1.1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(cppok_pgf({2, 1.0}, ExponentialJump(1.0), 0.5, 1.0), std::invalid_argument);
}

TEST_CASE("jump decomposition weights for unit jumps split the batch uniformly") {
  const DiracJump unit(1.0);
  const LevyMeasureWeights w = levy_measure_weights({2, 1.0}, unit, 2);
  REQUIRE(w.alpha.size() == 2);
  CHECK(w.alpha[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(w.alpha[1] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(w.nu[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(w.nu[1] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(w.tail_mass == doctest::Approx(0.0));
}

TEST_CASE("jump decomposition places mass only on multiples of a fixed jump") {
  const DiracJump three(3.0);
  const LevyMeasureWeights w = levy_measure_weights_auto({2, 1.0}, three);
  REQUIRE(w.alpha.size() >= 6);
  CHECK(w.alpha[2] == doctest::Approx(0.5).epsilon(1e-15));  // one batch member
  CHECK(w.alpha[5] == doctest::Approx(0.5).epsilon(1e-15));  // two batch members
  for (std::size_t j : {std::size_t{0}, std::size_t{1}, std::size_t{3}, std::size_t{4}}) {
    CHECK(w.alpha[j] == 0.0);
  }
}

TEST_CASE("jump decomposition weights sum to one and scale with rate and order") {
  const DiscreteJump law({0.2, 0.5, 0.3});
  const OrderKParams params{3, 1.7};
  const LevyMeasureWeights w = levy_measure_weights_auto(params, law);
  double total = 0.0;
  for (std::size_t j = 0; j < w.alpha.size(); ++j) {
    total += w.alpha[j];
    CHECK(w.nu[j] == doctest::Approx(3.0 * 1.7 * w.alpha[j]).epsilon(1e-14));
  }
  // Zero-valued batches carry no weight, so the alphas sum to the probability
  // of a non-zero batch contribution, not to 1.
  CHECK(total <= 1.0 + 1e-12);
  CHECK(w.tail_mass < 1e-10);
}

TEST_CASE("superposition sampler refuses a truncation that drops real mass") {
  const DiracJump unit(1.0);
  CHECK_THROWS_AS(SuperpositionSampler({2, 1.0}, unit, 1.0, 1, 1e-6), std::invalid_argument);
  CHECK_NOTHROW(SuperpositionSampler({2, 1.0}, unit, 1.0, 2, 1e-6));
}

TEST_CASE("superposition of split-weight Poisson streams matches the batch construction") {
  const OrderKParams params{2, 1.0};
  const DiracJump unit(1.0);
  std::vector<double> a = run_scalar_ensemble(
      [&](Rng& rng) {
        return static_cast<double>(superposition_sample(params, unit, 1.0, rng));
      },
      100000, 44901, 1);
  std::vector<double> b = run_scalar_ensemble(
      [&](Rng& rng) { return path_value_at(sample_ppok_path(params, 1.0, rng), 1.0); }, 100000,
      44902, 1);
  std::vector<std::int64_t> ia, ib;
  ia.reserve(a.size());
  ib.reserve(b.size());
  for (double v : a) ia.push_back(std::llround(v));
  for (double v : b) ib.push_back(std::llround(v));
  const TwoSampleResult r = two_sample_pmf_test(ia, ib);
  CHECK(r.p_value > 1e-3);
  CHECK(r.tv_distance < 0.01);
}

TEST_CASE("compensator is linear and the residual subtracts it from the path") {
  const OrderKParams params{2, 2.0};
  const ExponentialJump law(1.0);
  CHECK(martingale_compensator(params, law, 0.0) == 0.0);
  CHECK(martingale_compensator(params, law, 1.5) == doctest::Approx(9.0).epsilon(1e-15));
  ProcessPath path;
  path.times = {0.5};
  path.values = {4.0};
  path.horizon = 2.0;
  CHECK(martingale_residual(path, params, law, 1.0) ==
        doctest::Approx(4.0 - martingale_compensator(params, law, 1.0)));
  CHECK_THROWS_AS(martingale_residual(path, params, law, 3.0), std::invalid_argument);
}

TEST_CASE("marginal distribution of the Poisson special case") {
  const DiracJump unit(1.0);
  const OrderKParams params{1, 1.0};
  CHECK(marginal_cdf(params, unit, 1.0, -0.5) == 0.0);
  CHECK(marginal_cdf(params, unit, 1.0, 0.0) ==
        doctest::Approx(0.36787944117144232).epsilon(1e-12));
  CHECK(marginal_cdf(params, unit, 1.0, 2.5) ==
        doctest::Approx(0.9196986029286058).epsilon(1e-12));
}

TEST_CASE("marginal distribution for a discrete law matches naive convolution") {
  const OrderKParams params{2, 0.8};
  const std::vector<double> q{0.3, 0.7};
  const DiscreteJump law(q);
  const double t = 1.0;
  const PokPmfTable counts = pok_pmf_auto(params, t, 1e-14);
  for (double y : {0.0, 1.0, 3.0}) {
    double expect = 0.0;
    for (std::size_t n = 0; n < counts.probs.size(); ++n) {
      const std::vector<double> fold = naive_fold(q, static_cast<int>(n));
      double below = 0.0;
      for (std::size_t v = 0; v < fold.size() && static_cast<double>(v) <= y; ++v) {
        below += fold[v];
      }
      expect += counts.probs[n] * below;
    }
    CHECK(marginal_cdf(params, law, t, y) == doctest::Approx(expect).epsilon(1e-10));
  }
}

TEST_CASE("marginal distribution with exponential jumps uses the gamma convolution") {
  const OrderKParams params{1, 1.0};
  const ExponentialJump law(1.0);
  const double t = 1.0;
  for (double y : {0.5, 1.0, 3.0}) {
    const PokPmfTable counts = pok_pmf_auto(params, t, 1e-14);
    double expect = counts.probs[0];  // zero jumps: the sum is 0 <= y
    for (std::size_t n = 1; n < counts.probs.size(); ++n) {
      expect += counts.probs[n] * boost::math::gamma_p(static_cast<double>(n), y);
    }
    CHECK(marginal_cdf(params, law, t, y) == doctest::Approx(expect).epsilon(1e-10));
  }
}

TEST_CASE("marginal distribution steps at multiples of a fixed non-integer jump") {
  const OrderKParams params{2, 1.0};
  const DiracJump law(0.5);
  const PokPmfTable counts = pok_pmf(params, 1.0, 2);
  const double p01 = counts.probs[0] + counts.probs[1];
  CHECK(marginal_cdf(params, law, 1.0, 0.9) == doctest::Approx(p01).epsilon(1e-10));
  CHECK(marginal_cdf(params, law, 1.0, 1.0) ==
        doctest::Approx(p01 + counts.probs[2]).epsilon(1e-10));
}

TEST_CASE("marginal distribution refuses laws without a tractable convolution") {
  const UniformJump law;
  CHECK_THROWS_AS(marginal_cdf({1, 1.0}, law, 1.0, 0.5), std::domain_error);
}

}  // TEST_SUITE
