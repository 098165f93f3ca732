#pragma once

#include <istream>
#include <string>
#include <vector>

#include "magwell/pipeline.hpp"

namespace magwell {

struct SweepSettings {
  std::vector<int> p_list;
  std::vector<int> grids;
  int levels = 3;
  std::vector<std::string> out;  ///< report paths; .csv or .json by extension
};

/// Parsed run configuration. Grammar: `[section]` headers, `key = values`
/// lines, `#` to end of line is a comment. Sections: torus (l1, l2), field
/// (degree, repeated `mode = k1 k2 re im`, one line per conjugate pair),
/// solver (tol, max_iter, seed), sweep (p_list, grids, levels, out), model
/// (cutoffs, tolerance).
struct RunConfig {
  TorusSpec torus;
  int degree = 1;
  std::vector<FourierMode> modes;  ///< one per conjugate pair, as written
  SolverSettings solver;
  SweepSettings sweep;
  ModelSettings model;

  FieldSpec field() const;
};

/// Throws std::invalid_argument with the offending line number.
RunConfig parse_config(std::istream& in);
/// Throws std::runtime_error("cannot read config: <path>") when unreadable.
RunConfig load_config(const std::string& path);

}  // namespace magwell
