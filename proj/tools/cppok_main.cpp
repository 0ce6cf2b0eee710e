#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cppok/config.hpp"
#include "cppok/orderk.hpp"
#include "cppok/simulate.hpp"
#include "cppok/stats.hpp"
#include "cppok/timechange.hpp"
#include "cppok/verify.hpp"
#include "cppok/version.hpp"

namespace {

using namespace cppok;

void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot open output file: " + path);
  out << text;
}

// --- pmf -----------------------------------------------------------------------

struct PmfOptions {
  int k = 1;
  double lambda = 1.0;
  double t = 1.0;
  int nmax = 30;
  bool oracle = false;
  std::string out;
};

int cmd_pmf(const PmfOptions& opt) {
  const OrderKParams params{opt.k, opt.lambda};
  const PokPmfTable table = pok_pmf(params, opt.t, opt.nmax);
  std::ostringstream os;
  os << "# cppok version=" << kVersion << "\n";
  os << "# k=" << opt.k << "\n";
  os << "# lambda=" << format_significant(opt.lambda, 17) << "\n";
  os << "# t=" << format_significant(opt.t, 17) << "\n";
  os << "# tail_mass=" << format_significant(table.tail_mass(), 17) << "\n";
  double max_diff = 0.0;
  os << "[pmf]\n";
  os << (opt.oracle ? "n,p,p_enum,abs_diff\n" : "n,p\n");
  for (int n = 0; n <= opt.nmax; ++n) {
    const double p = table.probs[static_cast<std::size_t>(n)];
    os << n << "," << format_significant(p, 17);
    if (opt.oracle) {
      const double exact = pok_pmf_enum(params, opt.t, n);
      const double diff = std::abs(p - exact);
      max_diff = std::max(max_diff, diff);
      os << "," << format_significant(exact, 17) << "," << format_significant(diff, 17);
    }
    os << "\n";
  }
  write_text(opt.out, os.str());
  if (opt.oracle && max_diff > 1e-12) {
    std::cerr << "pmf oracle check failed: max |recursion - enumeration| = "
              << format_significant(max_diff, 17) << " > 1e-12\n";
    return 1;
  }
  return 0;
}

// --- simulate -------------------------------------------------------------------

struct SimulateOptions {
  std::string config_path;
  std::string out_override;
  std::int64_t replicates_override = -1;
  std::int64_t seed_override = -1;
  int workers_override = -1;
};

int cmd_simulate(const SimulateOptions& opt) {
  ExperimentConfig config = load_config(opt.config_path);
  if (!opt.out_override.empty()) config.output.path = opt.out_override;
  if (opt.replicates_override >= 0) config.monte_carlo.replicates = opt.replicates_override;
  if (opt.seed_override >= 0) {
    config.monte_carlo.master_seed = static_cast<std::uint64_t>(opt.seed_override);
  }
  if (opt.workers_override >= 0) config.monte_carlo.workers = opt.workers_override;
  config.monte_carlo.validate();
  write_text(config.output.path, simulation_report_text(config));
  return 0;
}

// --- dispersion ------------------------------------------------------------------

struct DispersionOptions {
  std::string config_path;
  int k = 1;
  double lambda = 1.0;
  std::string jump = "dirac";
  double point = 1.0;
  double rate = 1.0;
  std::vector<double> weights;
  double t = 1.0;
  bool empirical = false;
  std::int64_t replicates = 100000;
  std::int64_t seed = 0;
  int workers = 0;
};

void print_report(const DispersionReport& report) {
  std::cout << "gap=" << format_significant(report.gap, 17) << "\n";
  std::cout << "classification=" << to_string(report.classification) << "\n";
  std::cout << "prefactor=" << format_significant(report.prefactor, 17) << "\n";
  std::cout << "second_moment_term=" << format_significant(report.second_moment_term, 17) << "\n";
  std::cout << "mean_term=" << format_significant(report.mean_term, 17) << "\n";
  std::cout << "batch_term=" << format_significant(report.batch_term, 17) << "\n";
}

int cmd_dispersion(const DispersionOptions& opt) {
  if (opt.config_path.empty()) {
    // Inline base-process scan, no clock.
    const OrderKParams params{opt.k, opt.lambda};
    std::shared_ptr<const JumpLaw> law;
    if (opt.jump == "dirac") {
      law = std::make_shared<DiracJump>(opt.point);
    } else if (opt.jump == "exponential") {
      law = std::make_shared<ExponentialJump>(opt.rate);
    } else if (opt.jump == "discrete") {
      law = std::make_shared<DiscreteJump>(opt.weights);
    } else {
      throw std::invalid_argument("unknown --jump '" + opt.jump +
                                  "' (expected dirac | discrete | exponential)");
    }
    print_report(dispersion_report(params, *law, opt.t));
    return 0;
  }

  const ExperimentConfig config = load_config(opt.config_path);
  if (!config.has_clock()) {
    print_report(dispersion_report(config.process, *config.jumps, opt.t));
    return 0;
  }
  const TimeChangedSpec spec = config.time_changed_spec();
  const bool closed_form =
      spec.clock.kind == ClockKind::mtss && !spec.clock.params.has_zero_tempering();
  if (closed_form && !opt.empirical) {
    print_report(z1_dispersion_classify(spec, opt.t));
    return 0;
  }
  if (!opt.empirical) {
    std::cerr << "dispersion: no closed-form variance-minus-mean gap for this clock ("
              << (spec.clock.kind == ClockKind::inverse_mtss
                      ? "inverse clocks have simulated moments only"
                      : "an untempered (mu=0) component has infinite clock moments")
              << "); rerun with --empirical to estimate the gap by simulation\n";
    return 2;
  }
  // Monte Carlo gap estimate at the requested time.
  MonteCarloConfig mc = config.monte_carlo;
  mc.replicates = opt.replicates;
  mc.master_seed = static_cast<std::uint64_t>(opt.seed);
  mc.workers = opt.workers;
  mc.grid = {opt.t};
  const EnsembleSummary summary = run_ensemble(
      [&](Rng& rng, double* out) {
        const ProcessPath path = spec.clock.kind == ClockKind::mtss
                                     ? sample_z1(spec, mc.grid, rng)
                                     : sample_z2(spec, mc.grid, rng);
        out[0] = path.values[0];
      },
      mc);
  const double gap = summary.variance[0] - summary.mean[0];
  const double se =
      std::sqrt(summary.stderr_variance[0] * summary.stderr_variance[0] +
                summary.stderr_mean[0] * summary.stderr_mean[0]);
  std::cout << "gap=" << format_significant(gap, 17) << "\n";
  std::cout << "gap_stderr=" << format_significant(se, 17) << "\n";
  std::cout << "classification="
            << (gap > 0.0 ? "overdispersed" : (gap < 0.0 ? "underdispersed" : "equidispersed"))
            << "\n";
  std::cout << "method=empirical replicates=" << opt.replicates << "\n";
  if (std::abs(gap) < 2.0 * se) {
    std::cout << "note=gap within 2 stderr of zero; classification is not significant\n";
  }
  return 0;
}

// --- lrd -------------------------------------------------------------------------

struct LrdOptions {
  std::string config_path;
  std::string from_csv;
  double tmin_factor = 10.0;
  double tmax_factor = 1000.0;
  double tmin = 0.0;
  double tmax = 0.0;
  std::string out;
};

void render_lrd(std::ostream& os, const ExperimentConfig* config, double base_time,
                const std::vector<double>& times, const std::vector<double>& corr,
                const PowerLawFit& fit, DependenceRange verdict) {
  os << "# cppok version=" << kVersion << "\n";
  if (config != nullptr) {
    os << "# config_hash=" << config_hash_hex(*config) << "\n";
    os << "# seed=" << config->monte_carlo.master_seed << "\n";
    os << "# replicates=" << config->monte_carlo.replicates << "\n";
  }
  os << "# base_time=" << format_significant(base_time, 17) << "\n";
  os << "# fit_tmin=" << format_significant(fit.fit_tmin, 17) << "\n";
  os << "# fit_tmax=" << format_significant(fit.fit_tmax, 17) << "\n";
  os << "# fit_exponent=" << format_significant(fit.exponent, 17) << "\n";
  os << "# fit_log_amplitude=" << format_significant(fit.log_amplitude, 17) << "\n";
  os << "# fit_r_squared=" << format_significant(fit.r_squared, 17) << "\n";
  os << "# fit_points_used=" << fit.points_used << "\n";
  os << "# fit_points_trimmed=" << fit.points_trimmed << "\n";
  os << "# verdict=" << to_string(verdict) << "\n";
  os << "[correlation]\n";
  os << "t,corr\n";
  for (std::size_t i = 0; i < times.size(); ++i) {
    os << format_significant(times[i], 17) << "," << format_significant(corr[i], 17) << "\n";
  }
}

int cmd_lrd(const LrdOptions& opt) {
  std::ostringstream os;
  if (!opt.from_csv.empty()) {
    std::ifstream in(opt.from_csv);
    if (!in) throw std::invalid_argument("cannot open correlation file: " + opt.from_csv);
    std::vector<double> times, corr;
    double base_time = 0.0;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
      if (line.rfind("# base_time=", 0) == 0) {
        base_time = std::stod(line.substr(12));
        continue;
      }
      if (line.empty() || line[0] == '#' || line[0] == '[') continue;
      if (!header_seen) {  // column header row
        header_seen = true;
        continue;
      }
      const std::size_t comma = line.find(',');
      if (comma == std::string::npos) continue;
      times.push_back(std::stod(line.substr(0, comma)));
      corr.push_back(std::stod(line.substr(comma + 1)));
    }
    double tmin = opt.tmin;
    double tmax = opt.tmax;
    if (tmin <= 0.0 || tmax <= 0.0) {
      if (base_time <= 0.0) {
        throw std::invalid_argument(
            "lrd --from-csv: give --tmin and --tmax, or use a file carrying a base_time header");
      }
      tmin = opt.tmin_factor * base_time;
      tmax = opt.tmax_factor * base_time;
    }
    const PowerLawFit fit = fit_power_law(times, corr, tmin, tmax);
    render_lrd(os, nullptr, base_time, times, corr, fit, classify_dependence(fit.exponent));
    write_text(opt.out, os.str());
    return 0;
  }

  if (opt.config_path.empty()) {
    throw std::invalid_argument("lrd: either --config or --from-csv is required");
  }
  const ExperimentConfig config = load_config(opt.config_path);
  if (config.monte_carlo.grid.size() < 6) {
    throw std::invalid_argument(
        "lrd: monte_carlo.grid needs the base time plus at least 5 later points");
  }
  const SimulationResult sim = run_simulation(config);
  const LrdEstimate est =
      lrd_from_summary(sim.summary, 0, opt.tmin_factor, opt.tmax_factor);
  render_lrd(os, &config, est.base_time, est.times, est.corr, est.fit, est.verdict);
  write_text(opt.out, os.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"simulation and verification toolkit for order-k compound Poisson processes "
               "and their randomly time-changed variants"};
  app.set_version_flag("--version", std::string("cppok ") + kVersion);
  app.require_subcommand(1);

  PmfOptions pmf_opt;
  CLI::App* pmf = app.add_subcommand("pmf", "counting-distribution table");
  pmf->add_option("--k", pmf_opt.k, "order of the process")->required();
  pmf->add_option("--lambda", pmf_opt.lambda, "rate per component")->required();
  pmf->add_option("--t", pmf_opt.t, "time")->required();
  pmf->add_option("--nmax", pmf_opt.nmax, "largest count in the table")->required();
  pmf->add_flag("--oracle", pmf_opt.oracle,
                "also compute the enumeration oracle and fail on disagreement > 1e-12");
  pmf->add_option("--out", pmf_opt.out, "output file (default stdout)");

  SimulateOptions sim_opt;
  CLI::App* simulate = app.add_subcommand("simulate", "ensemble simulation from a config file");
  simulate->add_option("--config", sim_opt.config_path, "experiment config (JSON)")->required();
  simulate->add_option("--out", sim_opt.out_override, "override output.path");
  simulate->add_option("--replicates", sim_opt.replicates_override, "override replicate count");
  simulate->add_option("--seed", sim_opt.seed_override, "override master seed");
  simulate->add_option("--workers", sim_opt.workers_override,
                       "override worker count (0 = auto via CPPOK_WORKERS)");

  DispersionOptions disp_opt;
  CLI::App* dispersion =
      app.add_subcommand("dispersion", "variance-minus-mean gap and classification");
  dispersion->add_option("--config", disp_opt.config_path,
                         "experiment config (JSON); omit for an inline base process");
  dispersion->add_option("--k", disp_opt.k, "order (inline mode)");
  dispersion->add_option("--lambda", disp_opt.lambda, "rate (inline mode)");
  dispersion->add_option("--jump", disp_opt.jump, "jump law: dirac | discrete | exponential");
  dispersion->add_option("--point", disp_opt.point, "dirac point");
  dispersion->add_option("--rate", disp_opt.rate, "exponential rate");
  dispersion->add_option("--weights", disp_opt.weights, "discrete weights");
  dispersion->add_option("--t", disp_opt.t, "time")->required();
  dispersion->add_flag("--empirical", disp_opt.empirical,
                       "estimate the gap by simulation when no closed form exists");
  dispersion->add_option("--replicates", disp_opt.replicates, "empirical replicate count");
  dispersion->add_option("--seed", disp_opt.seed, "empirical master seed");
  dispersion->add_option("--workers", disp_opt.workers, "worker count (0 = auto)");

  LrdOptions lrd_opt;
  CLI::App* lrd = app.add_subcommand("lrd", "correlation-decay table, power-law fit, verdict");
  lrd->add_option("--config", lrd_opt.config_path, "experiment config (JSON)");
  lrd->add_option("--from-csv", lrd_opt.from_csv, "fit a previously computed correlation table");
  lrd->add_option("--tmin-factor", lrd_opt.tmin_factor, "fit window start as multiple of s");
  lrd->add_option("--tmax-factor", lrd_opt.tmax_factor, "fit window end as multiple of s");
  lrd->add_option("--tmin", lrd_opt.tmin, "explicit fit window start (with --from-csv)");
  lrd->add_option("--tmax", lrd_opt.tmax, "explicit fit window end (with --from-csv)");
  lrd->add_option("--out", lrd_opt.out, "output file (default stdout)");

  std::vector<std::string> suites;
  int verify_workers = 0;
  CLI::App* verify = app.add_subcommand("verify", "run acceptance criteria suites");
  verify->add_option("--suite", suites, "suite name(s); omit or use 'all' for every criterion");
  verify->add_option("--workers", verify_workers, "worker count (0 = auto via CPPOK_WORKERS)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (pmf->parsed()) return cmd_pmf(pmf_opt);
    if (simulate->parsed()) return cmd_simulate(sim_opt);
    if (dispersion->parsed()) return cmd_dispersion(disp_opt);
    if (lrd->parsed()) return cmd_lrd(lrd_opt);
    if (verify->parsed()) {
      std::vector<std::string> names;
      for (const std::string& s : suites) {
        if (s != "all") names.push_back(s);
      }
      return cppok::run_and_print_suites(std::cout, names, verify_workers);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
