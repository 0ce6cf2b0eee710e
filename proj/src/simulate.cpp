#include "cppok/simulate.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "cppok/version.hpp"

namespace cppok {

namespace {

// Closed-form companion columns for the configured target process, when the
// clock has finite moments.
struct TheoryColumns {
  bool available = false;
  std::string mean_name;
  std::string variance_name;
  bool cov_available = false;
  std::vector<double> mean;
  std::vector<double> variance;
  std::vector<std::vector<double>> cov;  // aligned with covariance rows (s<=t pairs)
};

GridSampler make_grid_sampler(const ExperimentConfig& config) {
  const std::vector<double>& grid = config.monte_carlo.grid;
  if (!config.has_clock()) {
    return [params = config.process, law = config.jumps, grid](Rng& rng, double* out) {
      double z = 0.0;
      double t_prev = 0.0;
      for (std::size_t g = 0; g < grid.size(); ++g) {
        z += sample_cppok_increment(params, *law, grid[g] - t_prev, rng);
        out[g] = z;
        t_prev = grid[g];
      }
    };
  }
  const TimeChangedSpec spec = config.time_changed_spec();
  if (spec.clock.kind == ClockKind::mtss) {
    return [spec, grid](Rng& rng, double* out) {
      const ProcessPath path = sample_z1(spec, grid, rng);
      for (std::size_t g = 0; g < grid.size(); ++g) out[g] = path.values[g];
    };
  }
  return [spec, grid](Rng& rng, double* out) {
    const ProcessPath path = sample_z2(spec, grid, rng);
    for (std::size_t g = 0; g < grid.size(); ++g) out[g] = path.values[g];
  };
}

TheoryColumns make_theory_columns(const ExperimentConfig& config,
                                  std::vector<std::string>& notes) {
  const std::vector<double>& grid = config.monte_carlo.grid;
  TheoryColumns theory;
  if (!config.has_clock()) {
    theory.available = true;
    theory.cov_available = true;
    theory.mean_name = "mean_theory";
    theory.variance_name = "variance_theory";
    for (double t : grid) {
      theory.mean.push_back(cppok_mean(config.process, *config.jumps, t));
      theory.variance.push_back(cppok_variance(config.process, *config.jumps, t));
    }
    return theory;
  }
  const TimeChangedSpec spec = config.time_changed_spec();
  if (spec.clock.params.has_zero_tempering()) {
    notes.push_back(
        "untempered clock component (mu=0): closed-form moment columns are unavailable");
    return theory;
  }
  if (spec.clock.kind == ClockKind::mtss) {
    theory.available = true;
    theory.cov_available = true;
    theory.mean_name = "mean_theory";
    theory.variance_name = "variance_theory";
    for (double t : grid) {
      theory.mean.push_back(z1_mean(spec, t));
      theory.variance.push_back(z1_variance(spec, t));
    }
    return theory;
  }
  theory.available = true;
  theory.cov_available = false;
  theory.mean_name = "mean_asymptote";
  theory.variance_name = "variance_asymptote";
  for (double t : grid) {
    const AsymptoticMoments asym = z2_asymptotics(spec, t);
    theory.mean.push_back(asym.mean);
    theory.variance.push_back(asym.variance);
  }
  notes.push_back(
      "inverse clock: companion columns are large-t asymptotes, not exact moments");
  return theory;
}

double theory_cov(const ExperimentConfig& config, double s, double t) {
  if (!config.has_clock()) {
    // Independent stationary increments: Cov[Z(s), Z(t)] = Var[Z(min(s,t))].
    return cppok_variance(config.process, *config.jumps, std::min(s, t));
  }
  return z1_cov(config.time_changed_spec(), s, t);
}

}  // namespace

SimulationResult run_simulation(const ExperimentConfig& config) {
  SimulationResult result;
  const std::vector<double>& grid = config.monte_carlo.grid;

  if (config.has_clock() && config.clock.kind == ClockKind::inverse_mtss) {
    result.inverse_bias_bound = config.clock.inverse_step > 0.0
                                    ? config.clock.inverse_step
                                    : default_inverse_step(config.clock.params, grid.back());
  }

  if (config.output.mode == "paths") {
    result.paths_table.columns = {"replicate", "time", "value"};
    for (std::int64_t i = 0; i < config.monte_carlo.replicates; ++i) {
      Rng rng = replicate_rng(config.monte_carlo.master_seed, static_cast<std::uint64_t>(i));
      if (!config.has_clock()) {
        const ProcessPath path =
            sample_cppok_path(config.process, *config.jumps, grid.back(), rng);
        for (std::size_t e = 0; e < path.times.size(); ++e) {
          result.paths_table.rows.push_back(
              {static_cast<double>(i), path.times[e], path.values[e]});
        }
      } else {
        const TimeChangedSpec spec = config.time_changed_spec();
        const ProcessPath path = spec.clock.kind == ClockKind::mtss
                                     ? sample_z1(spec, grid, rng)
                                     : sample_z2(spec, grid, rng);
        for (std::size_t g = 0; g < grid.size(); ++g) {
          result.paths_table.rows.push_back(
              {static_cast<double>(i), path.times[g], path.values[g]});
        }
      }
    }
    return result;
  }

  result.summary = run_ensemble(make_grid_sampler(config), config.monte_carlo);
  TheoryColumns theory = make_theory_columns(config, result.notes);

  result.summary_table.columns = {"t", "mean", "stderr_mean", "variance", "stderr_variance"};
  if (theory.available) {
    result.summary_table.columns.push_back(theory.mean_name);
    result.summary_table.columns.push_back(theory.variance_name);
  }
  for (std::size_t g = 0; g < grid.size(); ++g) {
    std::vector<double> row = {grid[g], result.summary.mean[g], result.summary.stderr_mean[g],
                               result.summary.variance[g], result.summary.stderr_variance[g]};
    if (theory.available) {
      row.push_back(theory.mean[g]);
      row.push_back(theory.variance[g]);
    }
    result.summary_table.rows.push_back(std::move(row));
  }

  result.covariance_table.columns = {"s", "t", "cov", "stderr_cov"};
  const bool cov_theory = theory.available && theory.cov_available;
  if (cov_theory) result.covariance_table.columns.push_back("cov_theory");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::size_t j = i; j < grid.size(); ++j) {
      std::vector<double> row = {grid[i], grid[j], result.summary.cov(i, j),
                                 result.summary.se_cov(i, j)};
      if (cov_theory) row.push_back(theory_cov(config, grid[i], grid[j]));
      result.covariance_table.rows.push_back(std::move(row));
    }
  }
  return result;
}

std::string format_significant(double value, int sig_digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", sig_digits, value);
  return std::string(buf);
}

namespace {

void render_meta_csv(std::ostream& os, const ExperimentConfig& config,
                     const SimulationResult& result) {
  os << "# cppok version=" << kVersion << "\n";
  os << "# config_hash=" << config_hash_hex(config) << "\n";
  os << "# seed=" << config.monte_carlo.master_seed << "\n";
  os << "# replicates=" << config.monte_carlo.replicates << "\n";
  os << "# process=order-" << config.process.order << " rate="
     << format_significant(config.process.rate, config.output.precision)
     << " jumps=" << config.jumps->describe() << "\n";
  os << "# clock=" << config.clock_type << "\n";
  if (config.has_clock()) {
    os << "# label=" << to_string(classify_clock(config.clock.params)) << "\n";
  }
  if (result.inverse_bias_bound > 0.0) {
    os << "# bias_bound=" << format_significant(result.inverse_bias_bound, config.output.precision)
       << "\n";
  }
  for (const std::string& note : result.notes) os << "# note=" << note << "\n";
}

void render_table_csv(std::ostream& os, const SimulationTable& table, const char* section,
                      int precision) {
  os << "[" << section << "]\n";
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (c) os << ",";
    os << table.columns[c];
  }
  os << "\n";
  for (const std::vector<double>& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) os << ",";
      os << format_significant(row[c], precision);
    }
    os << "\n";
  }
}

nlohmann::json table_json(const SimulationTable& table) {
  nlohmann::json out;
  out["columns"] = table.columns;
  out["rows"] = table.rows;
  return out;
}

}  // namespace

std::string render_simulation(const ExperimentConfig& config, const SimulationResult& result) {
  if (config.output.format == "json") {
    nlohmann::json doc;
    doc["meta"] = {{"version", kVersion},
                   {"config_hash", config_hash_hex(config)},
                   {"seed", config.monte_carlo.master_seed},
                   {"replicates", config.monte_carlo.replicates},
                   {"clock", config.clock_type},
                   {"notes", result.notes}};
    if (config.has_clock()) {
      doc["meta"]["label"] = to_string(classify_clock(config.clock.params));
    }
    if (result.inverse_bias_bound > 0.0) doc["meta"]["bias_bound"] = result.inverse_bias_bound;
    if (config.output.mode == "paths") {
      doc["paths"] = table_json(result.paths_table);
    } else {
      doc["summary"] = table_json(result.summary_table);
      doc["covariance"] = table_json(result.covariance_table);
    }
    return doc.dump(2) + "\n";
  }
  std::ostringstream os;
  render_meta_csv(os, config, result);
  if (config.output.mode == "paths") {
    render_table_csv(os, result.paths_table, "paths", config.output.precision);
  } else {
    render_table_csv(os, result.summary_table, "summary", config.output.precision);
    render_table_csv(os, result.covariance_table, "covariance", config.output.precision);
  }
  return os.str();
}

std::string simulation_report_text(const ExperimentConfig& config) {
  const SimulationResult result = run_simulation(config);
  return render_simulation(config, result);
}

}  // namespace cppok
