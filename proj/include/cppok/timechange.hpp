#pragma once

#include <memory>
#include <string>
#include <vector>

#include "cppok/orderk.hpp"
#include "cppok/stats.hpp"
#include "cppok/subordinator.hpp"

namespace cppok {

enum class ClockKind { mtss, inverse_mtss };

// Random clock driving the base process: either the subordinator itself or
// its first-passage inverse (with the lattice spacing used to simulate it;
// inverse_step <= 0 selects the default rule at sampling time).
struct ClockSpec {
  ClockKind kind = ClockKind::mtss;
  MtssParams params;
  double inverse_step = 0.0;
};

// Structural family of the composed process, read off the clock parameters:
// a single untempered component is the space-fractional case, a single
// tempered component the tempered-space-fractional case, everything else the
// general mixture.
enum class TimeChangeLabel { general, space_fractional, tempered_space_fractional };
std::string to_string(TimeChangeLabel label);
TimeChangeLabel classify_clock(const MtssParams& params);

struct TimeChangedSpec {
  OrderKParams base;
  std::shared_ptr<const JumpLaw> jumps;
  ClockSpec clock;
  void validate() const;
  TimeChangeLabel label() const { return classify_clock(clock.params); }
};

// --- Subordinated process (outer clock = subordinator) ---------------------------

// Values of the composed process at tgrid: the clock increment over each grid
// interval is drawn first, then the base-process increment over that much
// process time.  Exact in law, O(1) memory per interval.
ProcessPath sample_z1(const TimeChangedSpec& spec, const std::vector<double>& tgrid, Rng& rng);

// E[Z1(t)], Cov[Z1(s), Z1(t)], Var[Z1(t)]: closed forms in the base moments
// at unit time and the clock moments.  Refuse (mu = 0) clocks without finite
// moments.
double z1_mean(const TimeChangedSpec& spec, double t);
double z1_cov(const TimeChangedSpec& spec, double s, double t);
double z1_variance(const TimeChangedSpec& spec, double t);

// Variance-minus-mean sign of the subordinated process at time t.
DispersionReport z1_dispersion_classify(const TimeChangedSpec& spec, double t);

// Correlation decay of the subordinated process: Corr[Z1(s), Z1(t)] ~ K(s) *
// t^{-1/2} for large t, so the decay exponent is -1/2 universally and the
// process is long-range dependent; variance_slope is Var[Z1(t)] / t.
struct CorrelationDecay {
  double exponent = -0.5;
  double variance_slope = 0.0;
};
CorrelationDecay z1_lrd_exponent(const TimeChangedSpec& spec);

// --- Delayed process (outer clock = inverse subordinator) -------------------------

ProcessPath sample_z2(const TimeChangedSpec& spec, const std::vector<double>& tgrid, Rng& rng);

// Moment formulas with the clock moments supplied from simulation (the
// inverse clock has no closed-form moment surface): E[Z2(t)] and
// Cov[Z2(s), Z2(t)] for s <= t.
double z2_mean(const TimeChangedSpec& spec, double t, const InverseMomentTable& clock_moments);
double z2_cov(const TimeChangedSpec& spec, double s, double t,
              const InverseMomentTable& clock_moments);

// Large-t closed-form asymptotes of the delayed process' mean and variance
// (both linear in t with slopes set by the reciprocal clock drift).
struct AsymptoticMoments {
  double mean = 0.0;
  double variance = 0.0;
};
AsymptoticMoments z2_asymptotics(const TimeChangedSpec& spec, double t);

}  // namespace cppok
