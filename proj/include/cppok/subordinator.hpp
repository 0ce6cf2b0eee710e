#pragma once

#include <cstdint>
#include <vector>

#include "cppok/common.hpp"

namespace cppok {

// Two-component mixture of tempered stable subordinators.  The Laplace
// exponent is
//   f(s) = c1*((s+mu1)^alpha1 - mu1^alpha1) + c2*((s+mu2)^alpha2 - mu2^alpha2),
// with c1 + c2 = 1, alpha_i in (0,1), mu_i >= 0.  A component with c_i = 0 is
// inactive and its other parameters are ignored.  mu_i = 0 (pure stable) is a
// legal process with infinite mean; moment operations refuse it explicitly.
struct MtssParams {
  double c1 = 1.0;
  double c2 = 0.0;
  double alpha1 = 0.5;
  double alpha2 = 0.5;
  double mu1 = 1.0;
  double mu2 = 0.0;
  void validate() const;
  bool has_zero_tempering() const;  // any active component with mu == 0
};

struct TemperedComponent {
  double weight;
  double alpha;
  double mu;
};
std::vector<TemperedComponent> active_components(const MtssParams& params);

// f(s) above; s >= 0.
double laplace_exponent(const MtssParams& params, double s);

// E[S(t)] = t * sum_i c_i alpha_i mu_i^{alpha_i - 1}; refuses mu_i = 0.
double mtss_mean(const MtssParams& params, double t);
// Var[S(t)] = t * sum_i c_i alpha_i (1 - alpha_i) mu_i^{alpha_i - 2}.
double mtss_variance(const MtssParams& params, double t);
// Per-unit-time versions (slopes of the two lines above).
double mtss_mean_rate(const MtssParams& params);
double mtss_variance_rate(const MtssParams& params);

// One increment of an alpha-stable subordinator over dt, i.e. a positive
// variate with Laplace transform exp(-dt * s^alpha).
double sample_stable_increment(double alpha, double dt, Rng& rng);

// One increment over dt of a tempered stable subordinator with Laplace
// exponent c*((s+mu)^alpha - mu^alpha), by exponential tilting of the stable
// draw (rejection), subdividing dt to keep the acceptance rate >= e^{-1}.
double sample_tempered_stable_increment(double alpha, double mu, double c, double dt, Rng& rng);

// Mixture increment: independent sum of the active components' increments.
double sample_mtss_increment(const MtssParams& params, double dt, Rng& rng);

// Subordinator values on an increasing grid (grid[0] >= 0; S(0) = 0).
struct SubordinatorPath {
  std::vector<double> grid;
  std::vector<double> values;
};
SubordinatorPath sample_mtss_path(const MtssParams& params, std::vector<double> grid, Rng& rng);

// First-passage inverse E(t) = inf{r : S(r) > t} discretized on an
// operational-time lattice of spacing `step`: the reported value is the first
// lattice point r with S(r) > t, so it overshoots the true passage time by at
// most one step, which is the bias_bound.
struct InversePath {
  std::vector<double> grid;    // the query times t
  std::vector<double> values;  // E(t) on the lattice
  double bias_bound = 0.0;     // == step
};

// Optional capture of the subordinator values bracketing each passage:
// s_below[i] = S(E(t_i) - step) <= t_i < s_at[i] = S(E(t_i)).
struct PassageBrackets {
  std::vector<double> s_below;
  std::vector<double> s_at;
};

InversePath sample_inverse_path(const MtssParams& params, std::vector<double> tgrid, double step,
                                Rng& rng, PassageBrackets* brackets = nullptr,
                                std::uint64_t max_steps = 0);

// Long-run slope of E[E(t)]: 1 / mtss_mean_rate.  Refuses mu_i = 0.
double inverse_mean_asymptote(const MtssParams& params);

// Default lattice spacing rule: 1% of the expected inverse value at the far
// end of the query grid.  Requires finite moments (mu_i > 0).
double default_inverse_step(const MtssParams& params, double tmax);

}  // namespace cppok
