#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cppok {

// One acceptance criterion's outcome.  `detail` carries the measured
// quantities and the tolerances they were held to, so a failure is
// diagnosable from the one-line report alone.
struct CriterionResult {
  std::string id;
  std::string name;
  bool pass = false;
  std::string detail;
};

struct SuiteReport {
  std::string suite;
  std::vector<CriterionResult> results;
  bool all_pass() const;
};

// Suites, in criterion order: pmf, moments, dispersion, superposition,
// martingale, lrd, mtss, z1cov, z2asym, determinism.
std::vector<std::string> verify_suite_names();

// Runs one suite (workers = 0 means auto).  Unknown names throw
// std::invalid_argument listing the available suites.
SuiteReport run_verify_suite(const std::string& name, int workers = 0);

std::vector<SuiteReport> run_verify_all(int workers = 0);

// Runs the named suites (or all when `names` is empty), printing one
// machine-readable "PASS|FAIL <id> <name>: <detail>" line per criterion.
// Returns 0 when everything passed, 1 otherwise.
int run_and_print_suites(std::ostream& os, const std::vector<std::string>& names,
                         int workers = 0);

}  // namespace cppok
