#pragma once

#include <memory>
#include <string>

#include "cppok/orderk.hpp"
#include "cppok/stats.hpp"
#include "cppok/timechange.hpp"

namespace cppok {

// Output block of an experiment configuration.
struct OutputConfig {
  std::string format = "csv";  // "csv" | "json"
  std::string path;            // empty = stdout
  int precision = 17;          // significant digits for floating-point fields
  std::string mode = "summary";  // "summary" | "paths"
};

// Full experiment description, parsed from a JSON document with sections
// process / clock / monte_carlo / output.  `clock_kind` empty means the base
// process is simulated without a random clock.
struct ExperimentConfig {
  OrderKParams process;
  std::shared_ptr<const JumpLaw> jumps;
  std::string clock_type = "none";  // "none" | "mtss" | "inverse_mtss"
  ClockSpec clock;                  // meaningful when clock_type != "none"
  MonteCarloConfig monte_carlo;
  OutputConfig output;

  bool has_clock() const { return clock_type != "none"; }
  TimeChangedSpec time_changed_spec() const;  // requires has_clock()
};

// Parse + validate.  Errors are std::invalid_argument naming the offending
// field, e.g. "config field 'process.k': expected a positive integer".
ExperimentConfig parse_config_text(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

// FNV-1a fingerprint of the scientific content (process, clock, monte_carlo
// minus the worker count).  Worker count and output routing never change
// results, so they never change the hash.
std::string config_hash_hex(const ExperimentConfig& config);

}  // namespace cppok
