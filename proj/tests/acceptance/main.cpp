// Runs the acceptance criteria and prints one PASS/FAIL line per criterion.
// Usage: magwell_acceptance_tests [--only 1,2,9] [--quiet]

#include <cstring>
#include <iostream>
#include <sstream>
#include <string>

#include "acceptance.hpp"

int main(int argc, char** argv) {
  magwell::AcceptanceOptions opts;
  bool quiet = false;
  for (int i = 1; i < argc; ++i) {
    if (!std::strcmp(argv[i], "--only") && i + 1 < argc) {
      std::istringstream is(argv[++i]);
      for (std::string tok; std::getline(is, tok, ',');) opts.only.insert(std::stoi(tok));
    } else if (!std::strcmp(argv[i], "--quiet")) {
      quiet = true;
    } else {
      std::cerr << "usage: " << argv[0] << " [--only LIST] [--quiet]\n";
      return 1;
    }
  }
  if (!quiet) opts.log = &std::cerr;
  const auto results = magwell::run_acceptance(opts);
  int failed = 0;
  for (const auto& r : results) {
    std::cout << magwell::format_result(r) << '\n';
    failed += !r.pass;
  }
  std::cout << results.size() - failed << "/" << results.size() << " criteria passed" << std::endl;
  return failed ? 1 : 0;
}
