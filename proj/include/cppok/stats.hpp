#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "cppok/common.hpp"
#include "cppok/orderk.hpp"
#include "cppok/subordinator.hpp"

namespace cppok {

// Environment variable consulted when workers == 0 (auto).
inline constexpr const char* kWorkersEnvVar = "CPPOK_WORKERS";
int resolve_workers(int requested);

struct MonteCarloConfig {
  std::int64_t replicates = 10000;
  std::uint64_t master_seed = 0;
  int workers = 0;  // 0 = auto (CPPOK_WORKERS, else 1)
  std::vector<double> grid;
  void validate() const;
};

// Ensemble moments on a fixed grid.  Results are a pure function of
// (sampler, replicates, master_seed): replicate i always draws from its own
// stream replicate_rng(master_seed, i), threads only fill disjoint slots, and
// the reduction runs single-threaded in replicate order with compensated
// sums, so changing the worker count cannot change any output bit.
struct EnsembleSummary {
  std::vector<double> grid;
  std::vector<double> mean;
  std::vector<double> variance;         // unbiased, (R-1) denominator
  std::vector<double> stderr_mean;
  std::vector<double> stderr_variance;  // large-R standard error of `variance`
  std::vector<double> covariance;       // G*G row-major, (R-1) denominator
  std::vector<double> stderr_covariance;
  std::int64_t replicates = 0;
  std::uint64_t master_seed = 0;
  int workers_used = 1;

  std::size_t size() const { return grid.size(); }
  double cov(std::size_t i, std::size_t j) const { return covariance[i * grid.size() + j]; }
  double se_cov(std::size_t i, std::size_t j) const {
    return stderr_covariance[i * grid.size() + j];
  }
  double correlation(std::size_t i, std::size_t j) const;
};

// Fills out[0..G-1] with one replicate's values at the config grid.
using GridSampler = std::function<void(Rng&, double*)>;

EnsembleSummary run_ensemble(const GridSampler& sampler, const MonteCarloConfig& config);

// Per-replicate scalar draws (replicate i's value from its own stream).
std::vector<double> run_scalar_ensemble(const std::function<double(Rng&)>& sampler,
                                        std::int64_t replicates, std::uint64_t master_seed,
                                        int workers);

// Moments of a flat sample with standard errors.
struct SampleSummary {
  double mean = 0.0;
  double variance = 0.0;
  double stderr_mean = 0.0;
  double stderr_variance = 0.0;
  std::int64_t count = 0;
};
SampleSummary summarize(const std::vector<double>& values);

// --- Correlation-decay fitting ------------------------------------------------

struct PowerLawFit {
  double exponent = 0.0;       // slope of log corr vs log t
  double log_amplitude = 0.0;  // intercept
  double r_squared = 0.0;
  double fit_tmin = 0.0;
  double fit_tmax = 0.0;
  int points_used = 0;
  int points_trimmed = 0;  // non-positive correlations dropped before the log fit
};

// Least squares on (log t, log corr) over t in [tmin, tmax].  Non-positive
// correlations in range are trimmed (counted in points_trimmed); at least 5
// usable points are required.
PowerLawFit fit_power_law(const std::vector<double>& times, const std::vector<double>& corr,
                          double tmin, double tmax);

enum class DependenceRange { long_range, short_range, outside };
std::string to_string(DependenceRange r);
// exponent in (-1, 0) => long_range; in (-2, -1) => short_range; else outside.
DependenceRange classify_dependence(double exponent);

struct LrdEstimate {
  double base_time = 0.0;
  std::vector<double> times;  // grid points beyond the base time
  std::vector<double> corr;   // Corr[X(base), X(t)]
  PowerLawFit fit;
  DependenceRange verdict = DependenceRange::outside;
};

// Correlation decay of grid point `base_index` against every later grid
// point, fitted over t in [tmin_factor*s, tmax_factor*s], s = grid[base_index].
LrdEstimate lrd_from_summary(const EnsembleSummary& summary, std::size_t base_index,
                             double tmin_factor = 10.0, double tmax_factor = 1000.0);

// --- Distribution-comparison tests ---------------------------------------------

struct TwoSampleResult {
  double tv_distance = 0.0;  // between the two empirical pmfs
  double chi2_stat = 0.0;
  int dof = 0;
  double p_value = 1.0;
};

// Homogeneity test for two integer samples: total-variation distance plus a
// two-row chi-square over the joint support, tail bins merged until every
// expected count reaches 5.
TwoSampleResult two_sample_pmf_test(const std::vector<std::int64_t>& a,
                                    const std::vector<std::int64_t>& b);

// Two-sample Kolmogorov-Smirnov distance and the large-sample critical value
// at level `alpha` (sqrt(-log(alpha/2)/2) * sqrt((n+m)/(n*m))).
double two_sample_ks(std::vector<double> a, std::vector<double> b);
double ks_critical_value(std::size_t n, std::size_t m, double alpha = 0.01);

// --- Martingale increment CIs ---------------------------------------------------

struct IncrementCi {
  double s = 0.0;
  double t = 0.0;
  double mean = 0.0;
  double se = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  bool contains_zero = true;
};

// For each (s, t) pair, a z-level confidence interval for
// E[M(t) - M(s)] where M(u) = path(u) - scale * compensator(u), using the
// ensemble covariance of the path at the pooled grid times.  z defaults to
// the 99% two-sided normal quantile.
std::vector<IncrementCi> martingale_increment_test(
    const std::function<ProcessPath(Rng&)>& path_sampler, const OrderKParams& params,
    const JumpLaw& law, const std::vector<std::pair<double, double>>& pairs,
    std::int64_t replicates, std::uint64_t master_seed, int workers,
    double compensator_scale = 1.0, double z = 2.5758293035489004);

// --- Monte Carlo moments of the inverse subordinator ----------------------------

// Simulated moment surface of E(t) on a grid, with the lattice bias bound.
// These tables are the required inputs of the time-changed covariance
// formulas: the inverse clock has no closed-form moments here.
struct InverseMomentTable {
  EnsembleSummary summary;
  double bias_bound = 0.0;
  std::size_t index_of(double t) const;  // exact grid lookup (1e-9 rel tol)
  double mean_at(double t) const;
  double variance_at(double t) const;
  double cov_at(double s, double t) const;
  double se_mean_at(double t) const;
  double se_cov_at(double s, double t) const;
};

InverseMomentTable inverse_moment_table(const MtssParams& params,
                                        const std::vector<double>& tgrid, double step,
                                        std::int64_t replicates, std::uint64_t master_seed,
                                        int workers);

}  // namespace cppok
