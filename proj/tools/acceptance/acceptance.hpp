#pragma once

#include <iosfwd>
#include <set>
#include <string>
#include <vector>

namespace magwell {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;  ///< measured values behind the verdict
  double seconds = 0.0;
};

struct AcceptanceOptions {
  std::set<int> only;            ///< empty: every criterion
  std::ostream* log = nullptr;   ///< progress lines, optional
};

/// Runs the acceptance criteria in order. Criteria 4, 6 and 7 share one
/// lattice sweep when run together.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts);

/// "PASS [n] name: detail (t s)"
std::string format_result(const CriterionResult& r);

}  // namespace magwell
