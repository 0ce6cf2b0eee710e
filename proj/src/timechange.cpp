#include "cppok/timechange.hpp"

#include <cmath>
#include <stdexcept>

namespace cppok {

namespace {

void require_time(double t, const char* who) {
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw std::invalid_argument(std::string(who) + ": time must be finite and >= 0");
  }
}

void require_tgrid(const std::vector<double>& tgrid, const char* who) {
  if (tgrid.empty()) throw std::invalid_argument(std::string(who) + ": tgrid must be non-empty");
  double prev = 0.0;
  for (double t : tgrid) {
    if (!(t >= 0.0) || !std::isfinite(t)) {
      throw std::invalid_argument(std::string(who) + ": tgrid must be finite and >= 0");
    }
    if (t < prev) throw std::invalid_argument(std::string(who) + ": tgrid must be non-decreasing");
    prev = t;
  }
}

// Base-process moments at unit time, shared by every closed form below.
struct UnitMoments {
  double mean;      // E[Z(1)]
  double variance;  // Var[Z(1)]
};

UnitMoments unit_moments(const TimeChangedSpec& spec) {
  return {cppok_mean(spec.base, *spec.jumps, 1.0), cppok_variance(spec.base, *spec.jumps, 1.0)};
}

}  // namespace

std::string to_string(TimeChangeLabel label) {
  switch (label) {
    case TimeChangeLabel::general: return "general";
    case TimeChangeLabel::space_fractional: return "space-fractional";
    case TimeChangeLabel::tempered_space_fractional: return "tempered-space-fractional";
  }
  return "unknown";
}

TimeChangeLabel classify_clock(const MtssParams& params) {
  const std::vector<TemperedComponent> comps = active_components(params);
  // Identical components collapse to a single subordinator, so treat them as one.
  const bool single = comps.size() == 1 ||
                      (comps.size() == 2 && comps[0].alpha == comps[1].alpha &&
                       comps[0].mu == comps[1].mu);
  if (!single) return TimeChangeLabel::general;
  return comps[0].mu == 0.0 ? TimeChangeLabel::space_fractional
                            : TimeChangeLabel::tempered_space_fractional;
}

void TimeChangedSpec::validate() const {
  base.validate();
  if (!jumps) throw std::invalid_argument("TimeChangedSpec: jump law must be set");
  clock.params.validate();
  if (clock.kind == ClockKind::inverse_mtss && clock.inverse_step < 0.0) {
    throw std::invalid_argument("TimeChangedSpec: inverse_step must be >= 0 (0 = default rule)");
  }
}

// --- Subordinated process -----------------------------------------------------

ProcessPath sample_z1(const TimeChangedSpec& spec, const std::vector<double>& tgrid, Rng& rng) {
  spec.validate();
  if (spec.clock.kind != ClockKind::mtss) {
    throw std::invalid_argument("sample_z1: spec must carry a subordinator clock");
  }
  require_tgrid(tgrid, "sample_z1");
  ProcessPath path;
  path.times = tgrid;
  path.horizon = tgrid.back();
  path.values.resize(tgrid.size());
  double t_prev = 0.0;
  double z = 0.0;
  for (std::size_t i = 0; i < tgrid.size(); ++i) {
    const double ds = sample_mtss_increment(spec.clock.params, tgrid[i] - t_prev, rng);
    z += sample_cppok_increment(spec.base, *spec.jumps, ds, rng);
    path.values[i] = z;
    t_prev = tgrid[i];
  }
  return path;
}

double z1_mean(const TimeChangedSpec& spec, double t) {
  spec.validate();
  require_time(t, "z1_mean");
  return unit_moments(spec).mean * mtss_mean(spec.clock.params, t);
}

double z1_cov(const TimeChangedSpec& spec, double s, double t) {
  spec.validate();
  require_time(s, "z1_cov");
  require_time(t, "z1_cov");
  if (s > t) std::swap(s, t);
  // Exact for a subordinator clock: Cov[S(s), S(t)] = Var[S(s)] by
  // independence of increments, hence conditioning gives
  //   Cov = E[Z(1)]^2 Var[S(s)] + E[S(s)] Var[Z(1)].
  const UnitMoments base = unit_moments(spec);
  return base.mean * base.mean * mtss_variance(spec.clock.params, s) +
         mtss_mean(spec.clock.params, s) * base.variance;
}

double z1_variance(const TimeChangedSpec& spec, double t) { return z1_cov(spec, t, t); }

DispersionReport z1_dispersion_classify(const TimeChangedSpec& spec, double t) {
  spec.validate();
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw std::invalid_argument("z1_dispersion_classify: time must be finite and > 0");
  }
  const UnitMoments base = unit_moments(spec);
  DispersionReport report;
  // gap = E[Z(1)]^2 Var[S(t)] + E[S(t)] (Var[Z(1)] - E[Z(1)]).
  report.prefactor = 1.0;
  report.second_moment_term = base.mean * base.mean * mtss_variance(spec.clock.params, t);
  report.mean_term = mtss_mean(spec.clock.params, t) * (base.variance - base.mean);
  report.batch_term = 0.0;
  report.gap = report.second_moment_term + report.mean_term;
  if (report.gap > kEquidispersionTol) {
    report.classification = Dispersion::over;
  } else if (report.gap < -kEquidispersionTol) {
    report.classification = Dispersion::under;
  } else {
    report.classification = Dispersion::equi;
  }
  return report;
}

CorrelationDecay z1_lrd_exponent(const TimeChangedSpec& spec) {
  spec.validate();
  CorrelationDecay decay;
  decay.exponent = -0.5;
  // For large t, Var[Z1(t)] ~ (E[Z(1)]^2 v + m Var[Z(1)]) * t and the frozen
  // numerator makes Corr[Z1(s), Z1(t)] proportional to t^{-1/2}; the slope
  // reported here is the variance growth rate entering that amplitude.
  const UnitMoments base = unit_moments(spec);
  decay.variance_slope = base.mean * base.mean * mtss_variance_rate(spec.clock.params) +
                         mtss_mean_rate(spec.clock.params) * base.variance;
  return decay;
}

// --- Delayed process ------------------------------------------------------------

ProcessPath sample_z2(const TimeChangedSpec& spec, const std::vector<double>& tgrid, Rng& rng) {
  spec.validate();
  if (spec.clock.kind != ClockKind::inverse_mtss) {
    throw std::invalid_argument("sample_z2: spec must carry an inverse-subordinator clock");
  }
  require_tgrid(tgrid, "sample_z2");
  double step = spec.clock.inverse_step;
  if (step <= 0.0) {
    if (spec.clock.params.has_zero_tempering()) {
      throw std::invalid_argument(
          "sample_z2: the default lattice rule needs finite clock moments; give an explicit "
          "inverse_step for an untempered clock");
    }
    step = default_inverse_step(spec.clock.params, tgrid.back());
  }
  const InversePath clock = sample_inverse_path(spec.clock.params, tgrid, step, rng);
  ProcessPath path;
  path.times = tgrid;
  path.horizon = tgrid.back();
  path.values.resize(tgrid.size());
  double e_prev = 0.0;
  double z = 0.0;
  for (std::size_t i = 0; i < tgrid.size(); ++i) {
    z += sample_cppok_increment(spec.base, *spec.jumps, clock.values[i] - e_prev, rng);
    path.values[i] = z;
    e_prev = clock.values[i];
  }
  return path;
}

double z2_mean(const TimeChangedSpec& spec, double t, const InverseMomentTable& clock_moments) {
  spec.validate();
  require_time(t, "z2_mean");
  return unit_moments(spec).mean * clock_moments.mean_at(t);
}

double z2_cov(const TimeChangedSpec& spec, double s, double t,
              const InverseMomentTable& clock_moments) {
  spec.validate();
  require_time(s, "z2_cov");
  require_time(t, "z2_cov");
  if (s > t) std::swap(s, t);
  const UnitMoments base = unit_moments(spec);
  return base.variance * clock_moments.mean_at(s) +
         base.mean * base.mean * clock_moments.cov_at(s, t);
}

AsymptoticMoments z2_asymptotics(const TimeChangedSpec& spec, double t) {
  spec.validate();
  require_time(t, "z2_asymptotics");
  const double k = spec.base.order;
  const double lambda = spec.base.rate;
  const double m1 = spec.jumps->mean();
  const double m2 = spec.jumps->second_moment();
  const double drift = mtss_mean_rate(spec.clock.params);
  AsymptoticMoments out;
  out.mean = 0.5 * k * (k + 1.0) * lambda * m1 * t / drift;
  out.variance = 0.5 * k * (k + 1.0) * lambda *
                 ((m2 - m1 * m1) + (2.0 * k + 1.0) / 3.0 * m1 * m1) * t / drift;
  return out;
}

}  // namespace cppok
