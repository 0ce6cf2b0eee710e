#include "cppok/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace cppok {

namespace {

using nlohmann::json;

[[noreturn]] void bad_field(const std::string& scope, const std::string& name,
                            const std::string& why) {
  throw std::invalid_argument("config field '" + scope + "." + name + "': " + why);
}

const json& require_object(const json& doc, const std::string& name) {
  if (!doc.contains(name)) {
    throw std::invalid_argument("config section '" + name + "' is required");
  }
  const json& section = doc.at(name);
  if (!section.is_object()) {
    throw std::invalid_argument("config section '" + name + "' must be an object");
  }
  return section;
}

double get_number(const json& section, const std::string& scope, const std::string& name,
                  const double* fallback = nullptr) {
  if (!section.contains(name)) {
    if (fallback != nullptr) return *fallback;
    bad_field(scope, name, "required number is missing");
  }
  const json& v = section.at(name);
  if (!v.is_number()) bad_field(scope, name, "expected a number");
  return v.get<double>();
}

std::int64_t get_integer(const json& section, const std::string& scope, const std::string& name,
                         const std::int64_t* fallback = nullptr) {
  if (!section.contains(name)) {
    if (fallback != nullptr) return *fallback;
    bad_field(scope, name, "required integer is missing");
  }
  const json& v = section.at(name);
  if (!v.is_number_integer()) bad_field(scope, name, "expected an integer");
  return v.get<std::int64_t>();
}

std::string get_string(const json& section, const std::string& scope, const std::string& name,
                       const char* fallback = nullptr) {
  if (!section.contains(name)) {
    if (fallback != nullptr) return fallback;
    bad_field(scope, name, "required string is missing");
  }
  const json& v = section.at(name);
  if (!v.is_string()) bad_field(scope, name, "expected a string");
  return v.get<std::string>();
}

std::shared_ptr<const JumpLaw> parse_jumps(const json& section) {
  if (!section.contains("jumps")) bad_field("process", "jumps", "required object is missing");
  const json& j = section.at("jumps");
  if (!j.is_object()) bad_field("process", "jumps", "expected an object");
  const std::string type = get_string(j, "process.jumps", "type");
  try {
    if (type == "dirac") {
      const double fallback = 1.0;
      return std::make_shared<DiracJump>(get_number(j, "process.jumps", "point", &fallback));
    }
    if (type == "discrete") {
      if (!j.contains("weights") || !j.at("weights").is_array()) {
        bad_field("process.jumps", "weights", "expected an array of numbers");
      }
      std::vector<double> weights;
      for (const json& w : j.at("weights")) {
        if (!w.is_number()) bad_field("process.jumps", "weights", "expected an array of numbers");
        weights.push_back(w.get<double>());
      }
      return std::make_shared<DiscreteJump>(std::move(weights));
    }
    if (type == "exponential") {
      return std::make_shared<ExponentialJump>(get_number(j, "process.jumps", "rate"));
    }
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument("config field 'process.jumps': " + std::string(e.what()));
  }
  bad_field("process.jumps", "type", "unknown jump law '" + type +
                                         "' (expected dirac | discrete | exponential)");
}

MtssParams parse_clock_params(const json& section, const std::string& scope) {
  MtssParams params;
  const double zero = 0.0, one = 1.0, half = 0.5;
  params.c1 = get_number(section, scope, "c1", &one);
  params.c2 = get_number(section, scope, "c2", &zero);
  params.alpha1 = get_number(section, scope, "alpha1", &half);
  params.alpha2 = get_number(section, scope, "alpha2", &half);
  params.mu1 = get_number(section, scope, "mu1", &zero);
  params.mu2 = get_number(section, scope, "mu2", &zero);
  try {
    params.validate();
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument("config section '" + scope + "': " + std::string(e.what()));
  }
  return params;
}

json canonical_scientific_json(const ExperimentConfig& config);

}  // namespace

TimeChangedSpec ExperimentConfig::time_changed_spec() const {
  if (!has_clock()) {
    throw std::logic_error("ExperimentConfig: no clock section; the base process is not time-changed");
  }
  TimeChangedSpec spec;
  spec.base = process;
  spec.jumps = jumps;
  spec.clock = clock;
  return spec;
}

ExperimentConfig parse_config_text(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw std::invalid_argument("config root must be a JSON object");

  ExperimentConfig config;

  const json& process = require_object(doc, "process");
  const std::int64_t k = get_integer(process, "process", "k");
  if (k < 1 || k > 1000000) bad_field("process", "k", "expected a positive integer");
  config.process.order = static_cast<int>(k);
  config.process.rate = get_number(process, "process", "lambda");
  try {
    config.process.validate();
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument("config section 'process': " + std::string(e.what()));
  }
  config.jumps = parse_jumps(process);

  if (doc.contains("clock")) {
    const json& clock = require_object(doc, "clock");
    config.clock_type = get_string(clock, "clock", "type", "none");
    if (config.clock_type == "mtss" || config.clock_type == "inverse_mtss") {
      config.clock.kind =
          config.clock_type == "mtss" ? ClockKind::mtss : ClockKind::inverse_mtss;
      config.clock.params = parse_clock_params(clock, "clock");
      const double zero = 0.0;
      config.clock.inverse_step = get_number(clock, "clock", "step", &zero);
      if (config.clock.inverse_step < 0.0) bad_field("clock", "step", "must be >= 0");
      if (config.clock_type == "inverse_mtss" && config.clock.inverse_step == 0.0 &&
          config.clock.params.has_zero_tempering()) {
        bad_field("clock", "step",
                  "an untempered inverse clock has no default lattice rule; give an explicit step");
      }
    } else if (config.clock_type != "none") {
      bad_field("clock", "type", "unknown clock '" + config.clock_type +
                                     "' (expected none | mtss | inverse_mtss)");
    }
  }

  const json& mc = require_object(doc, "monte_carlo");
  const std::int64_t default_reps = 10000;
  config.monte_carlo.replicates = get_integer(mc, "monte_carlo", "replicates", &default_reps);
  const std::int64_t default_seed = 0;
  const std::int64_t seed = get_integer(mc, "monte_carlo", "seed", &default_seed);
  config.monte_carlo.master_seed = static_cast<std::uint64_t>(seed);
  const std::int64_t default_workers = 0;
  const std::int64_t workers = get_integer(mc, "monte_carlo", "workers", &default_workers);
  if (workers < 0 || workers > 256) bad_field("monte_carlo", "workers", "expected 0..256");
  config.monte_carlo.workers = static_cast<int>(workers);
  if (!mc.contains("grid") || !mc.at("grid").is_array() || mc.at("grid").empty()) {
    bad_field("monte_carlo", "grid", "expected a non-empty array of times");
  }
  for (const json& g : mc.at("grid")) {
    if (!g.is_number()) bad_field("monte_carlo", "grid", "expected a non-empty array of times");
    config.monte_carlo.grid.push_back(g.get<double>());
  }
  try {
    config.monte_carlo.validate();
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument("config section 'monte_carlo': " + std::string(e.what()));
  }

  if (doc.contains("output")) {
    const json& output = require_object(doc, "output");
    config.output.format = get_string(output, "output", "format", "csv");
    if (config.output.format != "csv" && config.output.format != "json") {
      bad_field("output", "format", "expected csv | json");
    }
    config.output.path = get_string(output, "output", "path", "");
    const std::int64_t default_precision = 17;
    const std::int64_t precision = get_integer(output, "output", "precision", &default_precision);
    if (precision < 1 || precision > 17) bad_field("output", "precision", "expected 1..17");
    config.output.precision = static_cast<int>(precision);
    config.output.mode = get_string(output, "output", "mode", "summary");
    if (config.output.mode != "summary" && config.output.mode != "paths") {
      bad_field("output", "mode", "expected summary | paths");
    }
  }
  return config;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config_text(text.str());
}

namespace {

json jump_law_json(const JumpLaw& law) {
  // describe() is deterministic and covers all parameters.
  return json{{"describe", law.describe()}};
}

json canonical_scientific_json(const ExperimentConfig& config) {
  json doc;
  doc["process"] = {{"k", config.process.order},
                    {"lambda", config.process.rate},
                    {"jumps", jump_law_json(*config.jumps)}};
  doc["clock"] = {{"type", config.clock_type}};
  if (config.has_clock()) {
    doc["clock"]["c1"] = config.clock.params.c1;
    doc["clock"]["c2"] = config.clock.params.c2;
    doc["clock"]["alpha1"] = config.clock.params.alpha1;
    doc["clock"]["alpha2"] = config.clock.params.alpha2;
    doc["clock"]["mu1"] = config.clock.params.mu1;
    doc["clock"]["mu2"] = config.clock.params.mu2;
    doc["clock"]["step"] = config.clock.inverse_step;
  }
  doc["monte_carlo"] = {{"replicates", config.monte_carlo.replicates},
                        {"seed", config.monte_carlo.master_seed},
                        {"grid", config.monte_carlo.grid}};
  return doc;
}

}  // namespace

std::string config_hash_hex(const ExperimentConfig& config) {
  const std::string text = canonical_scientific_json(config).dump();
  const std::uint64_t h = fnv1a64(text.data(), text.size());
  char buf[19];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace cppok
