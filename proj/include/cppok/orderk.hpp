#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "cppok/common.hpp"

namespace cppok {

// Parameters of the order-k Poisson family.  The driving Poisson process has
// rate order*rate; each of its epochs delivers a batch whose size is uniform
// on {1, ..., order}.
struct OrderKParams {
  int order = 1;      // k >= 1
  double rate = 1.0;  // lambda > 0
  void validate() const;
};

// Distribution of a single jump mark Y.  Implementations must have finite
// mean and second moment; moment-based operations verify this and refuse
// otherwise.  Stateless and safe to share across threads.
class JumpLaw {
 public:
  virtual ~JumpLaw() = default;

  virtual double sample(Rng& rng) const = 0;
  virtual double mean() const = 0;
  virtual double second_moment() const = 0;
  double variance() const;

  // Sum of n independent draws.  The base implementation loops; subclasses
  // override where the n-fold sum has a closed-form sampler, which is what
  // keeps time-changed simulation exact when a clock increment carries an
  // enormous number of jumps.
  virtual double sum_sample(Rng& rng, std::int64_t n) const;

  // Non-null iff the law lives on {0, 1, 2, ...}; entries are q_0, q_1, ...
  virtual const std::vector<double>* integer_pmf() const { return nullptr; }

  // CDF at y of the fold-wise sum Y_1 + ... + Y_fold (fold >= 0).  Throws
  // std::domain_error when no tractable form exists for the law.
  virtual double convolution_cdf(std::int64_t fold, double y) const;

  virtual std::string describe() const = 0;
};

// Y == point almost surely.
class DiracJump final : public JumpLaw {
 public:
  explicit DiracJump(double point = 1.0);
  double sample(Rng&) const override { return point_; }
  double mean() const override { return point_; }
  double second_moment() const override { return point_ * point_; }
  double sum_sample(Rng&, std::int64_t n) const override;
  const std::vector<double>* integer_pmf() const override;
  double convolution_cdf(std::int64_t fold, double y) const override;
  std::string describe() const override;
  double point() const { return point_; }

 private:
  double point_;
  std::vector<double> pmf_;  // populated iff point_ is a small non-negative integer
};

// Y on {0, 1, ..., m} with explicit weights (normalized to 1 within 1e-12).
class DiscreteJump final : public JumpLaw {
 public:
  explicit DiscreteJump(std::vector<double> weights);
  double sample(Rng& rng) const override;
  double mean() const override { return mean_; }
  double second_moment() const override { return second_; }
  double sum_sample(Rng& rng, std::int64_t n) const override;
  const std::vector<double>* integer_pmf() const override { return &weights_; }
  double convolution_cdf(std::int64_t fold, double y) const override;
  std::string describe() const override;

 private:
  std::vector<double> weights_;
  std::vector<double> cdf_;
  double mean_ = 0.0;
  double second_ = 0.0;
};

// Y ~ Exponential(rate), mean 1/rate.
class ExponentialJump final : public JumpLaw {
 public:
  explicit ExponentialJump(double rate);
  double sample(Rng& rng) const override;
  double mean() const override { return 1.0 / rate_; }
  double second_moment() const override { return 2.0 / (rate_ * rate_); }
  double sum_sample(Rng& rng, std::int64_t n) const override;
  double convolution_cdf(std::int64_t fold, double y) const override;
  std::string describe() const override;
  double rate() const { return rate_; }

 private:
  double rate_;
};

// Counting-marginal pmf table: probs[n] = P{count at `time` == n}.
struct PokPmfTable {
  OrderKParams params;
  double time = 0.0;
  std::vector<double> probs;
  double tail_mass() const;  // max(0, 1 - sum(probs))
};

// Right-continuous piecewise-constant path: value at t is values[i] for the
// largest times[i] <= t, and 0 before the first event.
struct ProcessPath {
  std::vector<double> times;
  std::vector<double> values;
  double horizon = 0.0;
};
double path_value_at(const ProcessPath& path, double t);

// --- Counting distribution ------------------------------------------------

// Direct enumeration of P{count == n} as a sum over batch-composition vectors
// (x_1,...,x_k) with sum i*x_i = n.  Exponential in spirit, so it guards the
// number of visited compositions; the fast path below must agree with this to
// near machine precision.
double pok_pmf_enum(const OrderKParams& params, double t, int n,
                    std::uint64_t max_terms = 20000000);

// One-pass recursion: p_0 = exp(-k*lambda*t),
// p_n = (lambda*t/n) * sum_{i=1}^{min(k,n)} i * p_{n-i}.
PokPmfTable pok_pmf(const OrderKParams& params, double t, int nmax);

// Table extended until the captured mass reaches 1 - tail_eps.
PokPmfTable pok_pmf_auto(const OrderKParams& params, double t, double tail_eps = 1e-10);

// --- Path sampling ----------------------------------------------------------

// Counting path: epochs from a Poisson(order*rate) clock, each adding a batch
// size uniform on {1..order}.
ProcessPath sample_ppok_path(const OrderKParams& params, double horizon, Rng& rng);

// Compound path: at each epoch the batch of size X contributes the sum of X
// fresh draws from `law`.
ProcessPath sample_cppok_path(const OrderKParams& params, const JumpLaw& law,
                              double horizon, Rng& rng);

// Exact draw of the compound increment over a window of length dt, without
// materializing events: the batch count over dt equals sum_{j<=k} j*Poisson(lambda*dt)
// in distribution, and the jump law contributes via its bulk sum sampler.
double sample_cppok_increment(const OrderKParams& params, const JumpLaw& law,
                              double dt, Rng& rng);

// --- Moments and dispersion -------------------------------------------------

double cppok_mean(const OrderKParams& params, const JumpLaw& law, double t);
double cppok_variance(const OrderKParams& params, const JumpLaw& law, double t);

enum class Dispersion { over, under, equi };
std::string to_string(Dispersion d);

// |variance - mean| below this is classified as equidispersed.
inline constexpr double kEquidispersionTol = 1e-12;

struct DispersionReport {
  double gap = 0.0;  // variance - mean
  Dispersion classification = Dispersion::equi;
  // gap = prefactor * (second_moment_term + mean_term + batch_term)
  double prefactor = 0.0;           // k(k+1)/2 * lambda * t
  double second_moment_term = 0.0;  // E[Y^2]
  double mean_term = 0.0;           // -E[Y]
  double batch_term = 0.0;          // ((2k+1)/3 - 1) * E[Y]^2
};
DispersionReport dispersion_report(const OrderKParams& params, const JumpLaw& law, double t);

// --- Transform, weights, superposition --------------------------------------

// Probability generating function E[u^{Z(t)}] for integer-valued jump laws,
// u in [0, 1].
double cppok_pgf(const OrderKParams& params, const JumpLaw& law, double u, double t);

// Weights of the integer jump decomposition: alpha[j-1] is the probability
// that a single batch contributes j to the total, nu[j-1] = k*lambda*alpha[j-1]
// the corresponding Poisson intensity.  tail_mass is the weight beyond jmax.
struct LevyMeasureWeights {
  std::vector<double> alpha;
  std::vector<double> nu;
  double tail_mass = 0.0;
};
LevyMeasureWeights levy_measure_weights(const OrderKParams& params, const JumpLaw& law,
                                        int jmax);
// jmax grown until tail_mass < tail_eps.
LevyMeasureWeights levy_measure_weights_auto(const OrderKParams& params, const JumpLaw& law,
                                             double tail_eps = 1e-10);

// Draws the integer-valued total at time t as an independent superposition
// sum_j j * Poisson(nu_j * t).  Weights are precomputed once; tail mass above
// `tail_tol` is refused at construction.
class SuperpositionSampler {
 public:
  SuperpositionSampler(const OrderKParams& params, const JumpLaw& law, double t,
                       int jmax, double tail_tol = 1e-6);
  // Auto-truncated variant (tail below 1e-10).
  SuperpositionSampler(const OrderKParams& params, const JumpLaw& law, double t);
  std::int64_t sample(Rng& rng) const;
  double tail_mass() const { return tail_mass_; }

 private:
  std::vector<double> poisson_means_;
  double tail_mass_ = 0.0;
};
std::int64_t superposition_sample(const OrderKParams& params, const JumpLaw& law,
                                  double t, Rng& rng);

// --- Compensation and marginal CDF ------------------------------------------

// E[Z(t)] = k(k+1)/2 * lambda * t * E[Y]: subtracting it makes the path a
// martingale in t.
double martingale_compensator(const OrderKParams& params, const JumpLaw& law, double t);
double martingale_residual(const ProcessPath& path, const OrderKParams& params,
                           const JumpLaw& law, double t);

// P{Z(t) <= y} = sum_j P{count == j} * CDF of the j-fold jump sum at y.
// Supported for integer-valued laws (exact convolution) and laws exposing a
// closed-form convolution CDF (Dirac, Exponential).
double marginal_cdf(const OrderKParams& params, const JumpLaw& law, double t, double y,
                    double tail_eps = 1e-10);

}  // namespace cppok
