// Acceptance gate: runs the verification suites and prints one PASS/FAIL line
// per criterion.  Exit status 0 iff every requested criterion passed.
//
//   cppok_acceptance [--suite NAME]... [--workers N]
//
// With no --suite argument (or "--suite all") every criterion runs in order.
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "cppok/verify.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> suites;
  int workers = 0;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--suite" && i + 1 < argc) {
      const std::string name = argv[++i];
      if (name != "all") suites.push_back(name);
    } else if (arg == "--workers" && i + 1 < argc) {
      workers = std::atoi(argv[++i]);
    } else if (arg == "--help" || arg == "-h") {
      std::cout << "usage: cppok_acceptance [--suite NAME]... [--workers N]\n"
                << "suites:";
      for (const std::string& name : cppok::verify_suite_names()) std::cout << " " << name;
      std::cout << "\n";
      return 0;
    } else {
      std::cerr << "unknown argument: " << arg << "\n";
      return 2;
    }
  }
  try {
    return cppok::run_and_print_suites(std::cout, suites, workers);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
