#include "cppok/verify.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "cppok/config.hpp"
#include "cppok/orderk.hpp"
#include "cppok/simulate.hpp"
#include "cppok/stats.hpp"
#include "cppok/subordinator.hpp"
#include "cppok/timechange.hpp"

namespace cppok {

namespace {

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

std::string fmt(double x, int precision = 6) {
  std::ostringstream os;
  os.precision(precision);
  os << x;
  return os.str();
}

// A running conjunction of named checks; the detail string keeps every
// sub-check's numbers so one report line tells the whole story.
struct CheckSet {
  bool pass = true;
  std::ostringstream detail;
  bool first = true;

  void add(const std::string& text, bool ok) {
    pass = pass && ok;
    if (!first) detail << "; ";
    first = false;
    detail << text << (ok ? "" : " <-- FAIL");
  }
};

// Reference base process: order 2, rate 1, Exponential(1) jumps.
OrderKParams reference_params() { return OrderKParams{2, 1.0}; }

// Reference clock: single tempered component, alpha 1/2, tempering 1.
MtssParams reference_clock() { return MtssParams{1.0, 0.0, 0.5, 0.5, 1.0, 0.0}; }

// --- C1: recursion vs enumeration --------------------------------------------------

CriterionResult criterion_pmf(int) {
  Stopwatch timer;
  CheckSet checks;
  double max_diff = 0.0;
  int cells = 0;
  for (int k = 1; k <= 5; ++k) {
    for (double lt : {0.5, 1.0, 2.0, 4.0}) {
      const OrderKParams params{k, lt};
      const PokPmfTable table = pok_pmf(params, 1.0, 30);
      for (int n = 0; n <= 30; ++n) {
        const double exact = pok_pmf_enum(params, 1.0, n);
        max_diff = std::max(max_diff, std::abs(table.probs[static_cast<std::size_t>(n)] - exact));
        ++cells;
      }
    }
  }
  const double elapsed = timer.seconds();
  checks.add("max |recursion - enumeration| = " + fmt(max_diff, 3) + " over " +
                 std::to_string(cells) + " cells (tol 1e-12)",
             max_diff < 1e-12);
  checks.add("elapsed " + fmt(elapsed, 3) + "s (budget 10s)", elapsed < 10.0);
  return {"C1", "pmf-recursion-vs-enumeration", checks.pass, checks.detail.str()};
}

// --- C2: ensemble moments of the reference compound process -------------------------

CriterionResult criterion_moments(int workers) {
  Stopwatch timer;
  const OrderKParams params = reference_params();
  const ExponentialJump law(1.0);
  MonteCarloConfig config;
  config.replicates = 1000000;
  config.master_seed = 118822;
  config.workers = workers;
  config.grid = {0.5, 1.0, 2.0};
  const EnsembleSummary summary = run_ensemble(
      [&](Rng& rng, double* out) {
        double z = 0.0;
        double prev = 0.0;
        for (std::size_t g = 0; g < config.grid.size(); ++g) {
          z += sample_cppok_increment(params, law, config.grid[g] - prev, rng);
          out[g] = z;
          prev = config.grid[g];
        }
      },
      config);
  CheckSet checks;
  for (std::size_t g = 0; g < config.grid.size(); ++g) {
    const double t = config.grid[g];
    const double mean_err = std::abs(summary.mean[g] - 3.0 * t);
    const double var_err = std::abs(summary.variance[g] - 8.0 * t);
    checks.add("t=" + fmt(t, 3) + ": |mean-" + fmt(3.0 * t, 3) + "|=" + fmt(mean_err, 3) +
                   " (4SE=" + fmt(4.0 * summary.stderr_mean[g], 3) + ")",
               mean_err <= 4.0 * summary.stderr_mean[g]);
    checks.add("|var-" + fmt(8.0 * t, 3) + "|=" + fmt(var_err, 3) +
                   " (4SE=" + fmt(4.0 * summary.stderr_variance[g], 3) + ")",
               var_err <= 4.0 * summary.stderr_variance[g]);
  }
  const double elapsed = timer.seconds();
  checks.add("elapsed " + fmt(elapsed, 3) + "s (budget 120s)", elapsed < 120.0);
  return {"C2", "reference-moments-1e6", checks.pass, checks.detail.str()};
}

// --- C3: dispersion trichotomy and its exponential-jump threshold -------------------

CriterionResult criterion_dispersion(int) {
  CheckSet checks;
  const OrderKParams k1{1, 1.0};
  const DispersionReport over = dispersion_report(k1, ExponentialJump(1.0), 1.0);
  const DispersionReport equi = dispersion_report(k1, ExponentialJump(2.0), 1.0);
  const DispersionReport under = dispersion_report(k1, ExponentialJump(3.0), 1.0);
  checks.add("k=1 mu=1: gap=" + fmt(over.gap, 6) + " -> " + to_string(over.classification),
             over.classification == Dispersion::over);
  checks.add("k=1 mu=2: gap=" + fmt(equi.gap, 6) + " -> " + to_string(equi.classification),
             equi.classification == Dispersion::equi && equi.gap == 0.0);
  checks.add("k=1 mu=3: gap=" + fmt(under.gap, 6) + " -> " + to_string(under.classification),
             under.classification == Dispersion::under);
  const double lo = dispersion_report(k1, ExponentialJump(2.0 - 1e-6), 1.0).gap;
  const double hi = dispersion_report(k1, ExponentialJump(2.0 + 1e-6), 1.0).gap;
  checks.add("sign flip across mu=2: gap(2-1e-6)=" + fmt(lo, 3) + ", gap(2+1e-6)=" + fmt(hi, 3),
             lo > 0.0 && hi < 0.0);
  // The threshold scales as (2k+4)/3 with the order.
  const OrderKParams k2{2, 1.0};
  const double mu_star = (2.0 * 2.0 + 4.0) / 3.0;
  const double lo2 = dispersion_report(k2, ExponentialJump(mu_star * (1.0 - 1e-9)), 1.0).gap;
  const double hi2 = dispersion_report(k2, ExponentialJump(mu_star * (1.0 + 1e-9)), 1.0).gap;
  checks.add("k=2 threshold at mu=(2k+4)/3: sign flip", lo2 > 0.0 && hi2 < 0.0);
  return {"C3", "dispersion-threshold", checks.pass, checks.detail.str()};
}

// --- C4: one-path law vs independent Poisson superposition --------------------------

CriterionResult criterion_superposition(int workers) {
  const OrderKParams params{2, 1.0};
  const DiracJump law(1.0);
  const double t = 1.0;
  const std::int64_t n = 1000000;
  const std::vector<double> direct = run_scalar_ensemble(
      [&](Rng& rng) { return sample_cppok_increment(params, law, t, rng); }, n, 44801, workers);
  SuperpositionSampler super(params, law, t);
  const std::vector<double> layered = run_scalar_ensemble(
      [&](Rng& rng) { return static_cast<double>(super.sample(rng)); }, n, 44802, workers);
  std::vector<std::int64_t> a(direct.size()), b(layered.size());
  for (std::size_t i = 0; i < direct.size(); ++i) a[i] = std::llround(direct[i]);
  for (std::size_t i = 0; i < layered.size(); ++i) b[i] = std::llround(layered[i]);
  const TwoSampleResult test = two_sample_pmf_test(a, b);
  CheckSet checks;
  checks.add("tail mass " + fmt(super.tail_mass(), 3), super.tail_mass() < 1e-10);
  checks.add("chi2=" + fmt(test.chi2_stat, 6) + " dof=" + std::to_string(test.dof) +
                 " p=" + fmt(test.p_value, 6) + " (need p > 0.01)",
             test.p_value > 0.01);
  checks.add("tv distance " + fmt(test.tv_distance, 4), true);
  return {"C4", "superposition-equality", checks.pass, checks.detail.str()};
}

// --- C5: compensated-path increment CIs + miscompensated control ---------------------

CriterionResult criterion_martingale(int workers) {
  const OrderKParams params = reference_params();
  const ExponentialJump law(1.0);
  const std::vector<std::pair<double, double>> pairs = {{0.5, 1.0}, {1.0, 2.0}, {2.0, 4.0}};
  const auto path_sampler = [&](Rng& rng) { return sample_cppok_path(params, law, 4.0, rng); };

  const std::vector<IncrementCi> cis =
      martingale_increment_test(path_sampler, params, law, pairs, 200000, 55101, workers, 1.0);
  const std::vector<IncrementCi> control =
      martingale_increment_test(path_sampler, params, law, pairs, 100000, 55102, workers, 0.5);
  CheckSet checks;
  for (const IncrementCi& ci : cis) {
    checks.add("(s,t)=(" + fmt(ci.s, 3) + "," + fmt(ci.t, 3) + "): 99% CI [" + fmt(ci.lo, 4) +
                   ", " + fmt(ci.hi, 4) + "] covers 0",
               ci.contains_zero);
  }
  for (const IncrementCi& ci : control) {
    checks.add("half-compensated control (" + fmt(ci.s, 3) + "," + fmt(ci.t, 3) + "): CI [" +
                   fmt(ci.lo, 4) + ", " + fmt(ci.hi, 4) + "] excludes 0",
               !ci.contains_zero);
  }
  return {"C5", "martingale-increment-cis", checks.pass, checks.detail.str()};
}

// --- C6: correlation decay exponent -1/2 (base and subordinated) ---------------------

CriterionResult criterion_lrd(int workers) {
  std::vector<double> grid = {0.1};
  for (int i = 0; i <= 9; ++i) grid.push_back(std::pow(10.0, 2.0 * i / 9.0));

  const OrderKParams params{2, 1.0};
  const auto law = std::make_shared<DiracJump>(1.0);

  MonteCarloConfig config;
  config.replicates = 100000;
  config.master_seed = 66101;
  config.workers = workers;
  config.grid = grid;
  const EnsembleSummary base = run_ensemble(
      [&](Rng& rng, double* out) {
        double z = 0.0, prev = 0.0;
        for (std::size_t g = 0; g < grid.size(); ++g) {
          z += sample_cppok_increment(params, *law, grid[g] - prev, rng);
          out[g] = z;
          prev = grid[g];
        }
      },
      config);
  const LrdEstimate base_est = lrd_from_summary(base, 0);

  TimeChangedSpec spec;
  spec.base = params;
  spec.jumps = law;
  spec.clock = {ClockKind::mtss, reference_clock(), 0.0};
  config.master_seed = 66102;
  const EnsembleSummary sub = run_ensemble(
      [&](Rng& rng, double* out) {
        const ProcessPath path = sample_z1(spec, grid, rng);
        for (std::size_t g = 0; g < grid.size(); ++g) out[g] = path.values[g];
      },
      config);
  const LrdEstimate sub_est = lrd_from_summary(sub, 0);

  CheckSet checks;
  checks.add("base: exponent=" + fmt(base_est.fit.exponent, 4) + " in [-0.6,-0.4], r2=" +
                 fmt(base_est.fit.r_squared, 4) + " > 0.95, verdict " +
                 to_string(base_est.verdict),
             base_est.fit.exponent >= -0.6 && base_est.fit.exponent <= -0.4 &&
                 base_est.fit.r_squared > 0.95 &&
                 base_est.verdict == DependenceRange::long_range);
  checks.add("subordinated: exponent=" + fmt(sub_est.fit.exponent, 4) + " in [-0.6,-0.4], r2=" +
                 fmt(sub_est.fit.r_squared, 4) + " > 0.95, verdict " + to_string(sub_est.verdict),
             sub_est.fit.exponent >= -0.6 && sub_est.fit.exponent <= -0.4 &&
                 sub_est.fit.r_squared > 0.95 && sub_est.verdict == DependenceRange::long_range);
  const CorrelationDecay decay = z1_lrd_exponent(spec);
  checks.add("closed-form decay exponent " + fmt(decay.exponent, 3) + " == -0.5",
             decay.exponent == -0.5);
  return {"C6", "long-range-dependence", checks.pass, checks.detail.str()};
}

// --- C7: mixture subordinator moments and transform ----------------------------------

CriterionResult criterion_mtss(int workers) {
  Stopwatch timer;
  const MtssParams params{0.6, 0.4, 0.5, 0.7, 1.0, 2.0};
  const std::int64_t n = 1000000;
  const std::vector<double> draws = run_scalar_ensemble(
      [&](Rng& rng) { return sample_mtss_increment(params, 1.0, rng); }, n, 77101, workers);
  const SampleSummary stats = summarize(draws);
  const double mean_target = mtss_mean(params, 1.0);
  const double var_target = mtss_variance(params, 1.0);
  CheckSet checks;
  checks.add("mean " + fmt(stats.mean, 6) + " vs " + fmt(mean_target, 6) +
                 " (4SE=" + fmt(4.0 * stats.stderr_mean, 3) + ")",
             std::abs(stats.mean - mean_target) <= 4.0 * stats.stderr_mean);
  checks.add("variance " + fmt(stats.variance, 6) + " vs " + fmt(var_target, 6) +
                 " (4SE=" + fmt(4.0 * stats.stderr_variance, 3) + ")",
             std::abs(stats.variance - var_target) <= 4.0 * stats.stderr_variance);
  for (double s : {0.5, 1.0, 2.0}) {
    CompensatedSum acc, acc2;
    for (double x : draws) {
      const double e = std::exp(-s * x);
      acc.add(e);
      acc2.add(e * e);
    }
    const double lt = acc.value() / static_cast<double>(n);
    const double lt_var = std::max(0.0, acc2.value() / static_cast<double>(n) - lt * lt);
    const double se = std::sqrt(lt_var / static_cast<double>(n));
    const double target = std::exp(-laplace_exponent(params, s));
    checks.add("LT(s=" + fmt(s, 3) + ") " + fmt(lt, 6) + " vs " + fmt(target, 6) +
                   " (4SE=" + fmt(4.0 * se, 3) + ")",
               std::abs(lt - target) <= 4.0 * se);
  }
  const double elapsed = timer.seconds();
  checks.add("elapsed " + fmt(elapsed, 3) + "s (budget 60s)", elapsed < 60.0);
  return {"C7", "mixture-subordinator-moments", checks.pass, checks.detail.str()};
}

// --- C8: subordinated covariance formula ---------------------------------------------

CriterionResult criterion_z1cov(int workers) {
  TimeChangedSpec spec;
  spec.base = reference_params();
  spec.jumps = std::make_shared<ExponentialJump>(1.0);
  spec.clock = {ClockKind::mtss, reference_clock(), 0.0};
  const std::vector<double> grid = {1.0, 2.0};
  MonteCarloConfig config;
  config.replicates = 300000;
  config.master_seed = 88101;
  config.workers = workers;
  config.grid = grid;
  const EnsembleSummary summary = run_ensemble(
      [&](Rng& rng, double* out) {
        const ProcessPath path = sample_z1(spec, grid, rng);
        for (std::size_t g = 0; g < grid.size(); ++g) out[g] = path.values[g];
      },
      config);
  const double target = z1_cov(spec, 1.0, 2.0);
  const double measured = summary.cov(0, 1);
  const double se = summary.se_cov(0, 1);
  CheckSet checks;
  checks.add("Cov[Z1(1),Z1(2)] " + fmt(measured, 6) + " vs closed form " + fmt(target, 6) +
                 " (4SE=" + fmt(4.0 * se, 3) + ")",
             std::abs(measured - target) <= 4.0 * se);
  const double mean_target = z1_mean(spec, 1.0);
  checks.add("mean at t=1: " + fmt(summary.mean[0], 6) + " vs " + fmt(mean_target, 6) +
                 " (4SE=" + fmt(4.0 * summary.stderr_mean[0], 3) + ")",
             std::abs(summary.mean[0] - mean_target) <= 4.0 * summary.stderr_mean[0]);
  return {"C8", "subordinated-covariance", checks.pass, checks.detail.str()};
}

// --- C9: delayed-process asymptotic slopes -------------------------------------------

CriterionResult criterion_z2asym(int workers) {
  TimeChangedSpec spec;
  spec.base = OrderKParams{1, 1.0};
  spec.jumps = std::make_shared<DiracJump>(1.0);
  spec.clock = {ClockKind::inverse_mtss, reference_clock(), 0.25};
  const double t = 50.0;
  MonteCarloConfig config;
  config.replicates = 20000;
  config.master_seed = 99101;
  config.workers = workers;
  config.grid = {t};
  const EnsembleSummary summary = run_ensemble(
      [&](Rng& rng, double* out) { out[0] = sample_z2(spec, config.grid, rng).values[0]; },
      config);
  const AsymptoticMoments asym = z2_asymptotics(spec, t);
  const double mean_slope = summary.mean[0] / t;
  const double var_slope = summary.variance[0] / t;
  const double mean_target = asym.mean / t;
  const double var_target = asym.variance / t;
  CheckSet checks;
  checks.add("mean slope " + fmt(mean_slope, 5) + " vs " + fmt(mean_target, 5) + " (tol 5%)",
             std::abs(mean_slope - mean_target) <= 0.05 * mean_target);
  checks.add("variance slope " + fmt(var_slope, 5) + " vs " + fmt(var_target, 5) + " (tol 10%)",
             std::abs(var_slope - var_target) <= 0.10 * var_target);
  // Diagnostic: the renewal-corrected slope including clock fluctuations,
  // Var[Z(1)]/m + E[Z(1)]^2 v/m^3, which the ensemble does track.
  const double m = mtss_mean_rate(spec.clock.params);
  const double v = mtss_variance_rate(spec.clock.params);
  const double base_mean = cppok_mean(spec.base, *spec.jumps, 1.0);
  const double base_var = cppok_variance(spec.base, *spec.jumps, 1.0);
  const double corrected = base_var / m + base_mean * base_mean * v / (m * m * m);
  checks.add("diagnostic: renewal-corrected variance slope = " + fmt(corrected, 5) +
                 " (|measured-corrected|=" + fmt(std::abs(var_slope - corrected), 4) + ")",
             true);
  return {"C9", "delayed-asymptotics", checks.pass, checks.detail.str()};
}

// --- C10: byte determinism across reruns and worker counts ---------------------------

CriterionResult criterion_determinism(int) {
  const std::string base_config_text = R"({
    "process": {"k": 2, "lambda": 1.0, "jumps": {"type": "exponential", "rate": 1.0}},
    "monte_carlo": {"replicates": 20000, "seed": 20260819, "workers": 1, "grid": [0.5, 1.0, 2.0]},
    "output": {"format": "csv", "mode": "summary"}
  })";
  ExperimentConfig config = parse_config_text(base_config_text);
  const std::string once = simulation_report_text(config);
  const std::string again = simulation_report_text(config);
  config.monte_carlo.workers = 4;
  const std::string threaded = simulation_report_text(config);
  config.monte_carlo.workers = 1;
  config.monte_carlo.master_seed += 1;
  const std::string reseeded = simulation_report_text(config);

  ExperimentConfig clocked = parse_config_text(R"({
    "process": {"k": 1, "lambda": 1.0, "jumps": {"type": "dirac", "point": 1.0}},
    "clock": {"type": "mtss", "c1": 1.0, "alpha1": 0.5, "mu1": 1.0},
    "monte_carlo": {"replicates": 4000, "seed": 31001, "workers": 1, "grid": [0.5, 1.0]},
    "output": {"format": "csv", "mode": "summary"}
  })");
  const std::string clocked_once = simulation_report_text(clocked);
  clocked.monte_carlo.workers = 4;
  const std::string clocked_threaded = simulation_report_text(clocked);

  CheckSet checks;
  checks.add("same seed, workers=1 rerun: identical bytes (" +
                 std::to_string(once.size()) + " bytes)",
             once == again);
  checks.add("same seed, workers=4: identical bytes", once == threaded);
  checks.add("different seed: different bytes", once != reseeded);
  checks.add("clocked run, workers 1 vs 4: identical bytes", clocked_once == clocked_threaded);
  return {"C10", "byte-determinism", checks.pass, checks.detail.str()};
}

using CriterionFn = std::function<CriterionResult(int)>;

const std::vector<std::pair<std::string, CriterionFn>>& suite_table() {
  static const std::vector<std::pair<std::string, CriterionFn>> table = {
      {"pmf", criterion_pmf},
      {"moments", criterion_moments},
      {"dispersion", criterion_dispersion},
      {"superposition", criterion_superposition},
      {"martingale", criterion_martingale},
      {"lrd", criterion_lrd},
      {"mtss", criterion_mtss},
      {"z1cov", criterion_z1cov},
      {"z2asym", criterion_z2asym},
      {"determinism", criterion_determinism},
  };
  return table;
}

}  // namespace

bool SuiteReport::all_pass() const {
  for (const CriterionResult& r : results) {
    if (!r.pass) return false;
  }
  return true;
}

std::vector<std::string> verify_suite_names() {
  std::vector<std::string> names;
  for (const auto& [name, fn] : suite_table()) names.push_back(name);
  return names;
}

SuiteReport run_verify_suite(const std::string& name, int workers) {
  for (const auto& [suite, fn] : suite_table()) {
    if (suite == name) {
      SuiteReport report;
      report.suite = suite;
      report.results.push_back(fn(workers));
      return report;
    }
  }
  std::string known;
  for (const std::string& n : verify_suite_names()) known += (known.empty() ? "" : ", ") + n;
  throw std::invalid_argument("unknown verify suite '" + name + "' (available: " + known +
                              ", all)");
}

std::vector<SuiteReport> run_verify_all(int workers) {
  std::vector<SuiteReport> reports;
  for (const auto& [name, fn] : suite_table()) reports.push_back(run_verify_suite(name, workers));
  return reports;
}

int run_and_print_suites(std::ostream& os, const std::vector<std::string>& names, int workers) {
  std::vector<SuiteReport> reports;
  if (names.empty()) {
    reports = run_verify_all(workers);
  } else {
    for (const std::string& name : names) reports.push_back(run_verify_suite(name, workers));
  }
  bool all = true;
  for (const SuiteReport& report : reports) {
    for (const CriterionResult& r : report.results) {
      os << (r.pass ? "PASS" : "FAIL") << " " << r.id << " " << r.name << ": " << r.detail
         << "\n";
      all = all && r.pass;
    }
  }
  os << (all ? "ALL CRITERIA PASSED" : "CRITERIA FAILED") << "\n";
  return all ? 0 : 1;
}

}  // namespace cppok
