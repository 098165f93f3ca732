#include "magwell/config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace magwell {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(int line, const std::string& what) {
  throw std::invalid_argument("config line " + std::to_string(line) + ": " + what);
}

template <class T>
std::vector<T> values(const std::string& text, int line, const std::string& key) {
  std::istringstream is(text);
  is.imbue(std::locale::classic());
  std::vector<T> out;
  T v;
  while (is >> v) out.push_back(v);
  if (!is.eof()) fail(line, "bad value for " + key);
  if (out.empty()) fail(line, "missing value for " + key);
  return out;
}

template <class T>
T scalar(const std::string& text, int line, const std::string& key) {
  const auto v = values<T>(text, line, key);
  if (v.size() != 1) fail(line, key + " takes one value");
  return v[0];
}

}  // namespace

FieldSpec RunConfig::field() const { return build_field(torus, degree, conjugate_closure(modes)); }

RunConfig parse_config(std::istream& in) {
  RunConfig cfg;
  std::string section;
  std::set<std::string> seen_sections;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string text = trim(raw.substr(0, raw.find('#')));
    if (text.empty()) continue;
    if (text.front() == '[') {
      if (text.back() != ']') fail(line, "unterminated section header");
      section = trim(text.substr(1, text.size() - 2));
      static const std::set<std::string> known{"torus", "field", "solver", "sweep", "model"};
      if (!known.count(section)) fail(line, "unknown section [" + section + "]");
      seen_sections.insert(section);
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string::npos) fail(line, "expected key = value");
    const std::string key = trim(text.substr(0, eq));
    const std::string val = trim(text.substr(eq + 1));
    if (section.empty()) fail(line, "key outside a section");
    const std::string where = section + "." + key;

    if (where == "torus.l1") {
      cfg.torus.l1 = scalar<double>(val, line, key);
    } else if (where == "torus.l2") {
      cfg.torus.l2 = scalar<double>(val, line, key);
    } else if (where == "field.degree") {
      cfg.degree = scalar<int>(val, line, key);
    } else if (where == "field.mode") {
      std::istringstream is(val);
      is.imbue(std::locale::classic());
      FourierMode m;
      double re = 0, im = 0;
      std::string extra;
      if (!(is >> m.k1 >> m.k2 >> re >> im) || (is >> extra))
        fail(line, "mode needs k1 k2 re im");
      m.amplitude = {re, im};
      cfg.modes.push_back(m);
    } else if (where == "solver.tol") {
      cfg.solver.tol = scalar<double>(val, line, key);
    } else if (where == "solver.max_iter") {
      cfg.solver.max_iter = scalar<int>(val, line, key);
    } else if (where == "solver.seed") {
      cfg.solver.seed = scalar<std::uint64_t>(val, line, key);
    } else if (where == "sweep.p_list") {
      cfg.sweep.p_list = values<int>(val, line, key);
    } else if (where == "sweep.grids") {
      cfg.sweep.grids = values<int>(val, line, key);
    } else if (where == "sweep.levels") {
      cfg.sweep.levels = scalar<int>(val, line, key);
    } else if (where == "sweep.out") {
      cfg.sweep.out = values<std::string>(val, line, key);
    } else if (where == "model.cutoffs") {
      cfg.model.cutoffs = values<int>(val, line, key);
    } else if (where == "model.tolerance") {
      cfg.model.tolerance = scalar<double>(val, line, key);
    } else {
      fail(line, "unknown key " + where);
    }
  }
  for (const char* s : {"torus", "field"})
    if (!seen_sections.count(s)) throw std::invalid_argument(std::string("missing section [") + s + "]");
  if (!(cfg.torus.l1 > 0.0) || !(cfg.torus.l2 > 0.0)) throw std::invalid_argument("invalid torus");
  if (cfg.degree < 1) throw std::invalid_argument("degree must be >= 1");
  if (!(cfg.solver.tol > 0.0)) throw std::invalid_argument("solver tol must be positive");
  if (cfg.solver.max_iter < 1) throw std::invalid_argument("solver max_iter must be >= 1");
  if (cfg.sweep.levels < 1) throw std::invalid_argument("sweep levels must be >= 1");
  if (cfg.model.cutoffs.empty()) throw std::invalid_argument("model cutoffs empty");
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config: " + path);
  return parse_config(in);
}

}  // namespace magwell
