#pragma once

#include <string>
#include <vector>

#include "cppok/config.hpp"
#include "cppok/stats.hpp"

namespace cppok {

// A rectangular block of named numeric columns.
struct SimulationTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct SimulationResult {
  EnsembleSummary summary;          // summary mode only
  SimulationTable summary_table;    // per grid time: empirical moments (+ closed forms)
  SimulationTable covariance_table; // per grid pair (s <= t)
  SimulationTable paths_table;      // paths mode only: replicate, time, value
  std::vector<std::string> notes;   // conditions that disabled closed-form columns etc.
  double inverse_bias_bound = 0.0;  // > 0 iff an inverse clock was simulated
};

// Run the experiment described by the config (summary or paths mode).
SimulationResult run_simulation(const ExperimentConfig& config);

// Render a finished simulation in the configured format.  The text is a pure
// function of the scientific config content: re-running with a different
// worker count or output path yields identical bytes.
std::string render_simulation(const ExperimentConfig& config, const SimulationResult& result);

// run + render in one step.
std::string simulation_report_text(const ExperimentConfig& config);

// %.{sig}g formatting used for all floating-point output fields.
std::string format_significant(double value, int sig_digits);

}  // namespace cppok
