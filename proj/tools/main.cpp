// magwell: batch front end. Subcommands wells, model, lattice, sweep, verify.
// Exit codes: 0 success, 1 usage or config error, 2 computation error.
// Output is assembled in memory and written only once the command succeeded.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "acceptance.hpp"
#include "magwell/config.hpp"
#include "magwell/report.hpp"

namespace {

using namespace magwell;

struct Args {
  std::string config;
  std::vector<int> p;
  std::vector<int> grid;
  std::optional<int> levels;
  std::vector<std::string> out;
  std::string format = "csv";
  std::string only;
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Output {
  std::string stdout_text;
  std::vector<std::pair<std::string, std::string>> files;  // path, contents
  int status = 0;
};

bool wants_json(const std::string& path_or_format) {
  return path_or_format == "json" || std::filesystem::path(path_or_format).extension() == ".json";
}

Output cmd_wells(const RunConfig& cfg, const Args& a) {
  const std::vector<WellData> wells = find_wells(cfg.field());
  std::cerr << wells.size() << " well(s)\n";
  return {a.format == "json" ? wells_json(wells) : wells_csv(wells), {}, 0};
}

Output cmd_model(const RunConfig& cfg, const Args& a) {
  const int levels = a.levels.value_or(cfg.sweep.levels);
  const ModelTable t = model_table(cfg.field(), levels, cfg.model);
  char line[160];
  std::snprintf(line, sizeof line,
                "cutoff %d, convergence %.3e, three-oracle max disagreement %.3e\n", t.cutoff,
                t.convergence, t.max_disagreement);
  std::cerr << line;
  return {a.format == "json" ? model_json(t) : model_csv(t), {}, 0};
}

Output cmd_lattice(const RunConfig& cfg, const Args& a) {
  const std::vector<int>& ps = a.p.empty() ? cfg.sweep.p_list : a.p;
  const std::vector<int>& gs = a.grid.empty() ? cfg.sweep.grids : a.grid;
  if (ps.empty() || gs.empty()) throw UsageError("lattice needs --p and --grid (or sweep.p_list and sweep.grids)");
  if (a.p.size() > 1 || a.grid.size() > 1) throw UsageError("lattice takes a single --p and --grid");
  const int p = ps.front();
  const int n = a.grid.empty() ? gs.back() : gs.front();
  const int k = a.levels.value_or(cfg.sweep.levels);
  const LatticeOperator op = build_links(cfg.field(), p, n, n);
  if (op.under_resolved()) std::cerr << "warning: grid " << n << " under-resolves p = " << p << "\n";
  const EigResult eig = solve_lattice(op, k, cfg.solver);
  std::cerr << "p = " << p << ", grid " << n << ": " << eig.status << ", " << eig.matvecs << " matvecs\n";
  Output o{a.format == "json" ? lattice_json(eig, p, n, n) : lattice_csv(eig), {}, 0};
  if (!eig.converged) o.status = 2;
  return o;
}

Output cmd_sweep(const RunConfig& cfg, const Args& a) {
  const std::vector<int>& ps = a.p.empty() ? cfg.sweep.p_list : a.p;
  const std::vector<int>& gs = a.grid.empty() ? cfg.sweep.grids : a.grid;
  const std::vector<std::string>& outs = a.out.empty() ? cfg.sweep.out : a.out;
  const SweepReport rep = sweep(cfg.field(), ps, a.levels.value_or(cfg.sweep.levels), gs, cfg.solver, cfg.model);
  for (const SweepRecord& r : rep.records)
    if (r.flagged) std::cerr << "flagged: p = " << r.p << ", j = " << r.j << " extrapolation error above 10%\n";
  Output o;
  if (outs.empty()) o.stdout_text = a.format == "json" ? sweep_json(rep) : sweep_csv(rep);
  for (const std::string& path : outs) o.files.emplace_back(path, wants_json(path) ? sweep_json(rep) : sweep_csv(rep));
  return o;
}

Output cmd_verify(const Args& a) {
  AcceptanceOptions opts;
  opts.log = &std::cerr;
  std::istringstream is(a.only);
  for (std::string tok; std::getline(is, tok, ',');) {
    try {
      opts.only.insert(std::stoi(tok));
    } catch (const std::exception&) {
      throw UsageError("--only expects a comma-separated list of criterion numbers");
    }
  }
  Output o;
  int failed = 0;
  for (const CriterionResult& r : run_acceptance(opts)) {
    o.stdout_text += format_result(r) + "\n";
    failed += !r.pass;
  }
  if (failed) o.status = 2;
  return o;
}

void write_files(const std::vector<std::pair<std::string, std::string>>& files) {
  // Stage everything first so a failed write leaves no partial report set.
  std::vector<std::string> staged;
  for (const auto& [path, text] : files) {
    const std::string tmp = path + ".tmp";
    std::ofstream f(tmp, std::ios::binary);
    f << text;
    if (!f.good()) {
      for (const auto& s : staged) std::filesystem::remove(s);
      std::filesystem::remove(tmp);
      throw std::runtime_error("cannot write " + path);
    }
    staged.push_back(tmp);
  }
  for (size_t i = 0; i < files.size(); ++i) std::filesystem::rename(staged[i], files[i].first);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semiclassical spectra of magnetic Laplacians on the torus"};
  app.require_subcommand(1, 1);
  Args a;

  auto add_common = [&a](CLI::App* sub, bool sweep_like) {
    sub->add_option("--config", a.config, "run configuration file")->required();
    sub->add_option("--format", a.format, "output format for standard output")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--levels", a.levels, "number of levels")->check(CLI::PositiveNumber);
    if (sweep_like) {
      sub->add_option("--p", a.p, "tensor power(s), overrides sweep.p_list")->check(CLI::PositiveNumber);
      sub->add_option("--grid", a.grid, "grid size(s), overrides sweep.grids")->check(CLI::PositiveNumber);
    }
  };
  CLI::App* wells = app.add_subcommand("wells", "locate the wells of tau");
  add_common(wells, false);
  CLI::App* model = app.add_subcommand("model", "model-operator levels with oracle agreement");
  add_common(model, false);
  CLI::App* lattice = app.add_subcommand("lattice", "lowest lattice eigenvalues for one (p, grid)");
  add_common(lattice, true);
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "full p sweep with Richardson extrapolation");
  add_common(sweep_cmd, true);
  sweep_cmd->add_option("--out", a.out, "report paths, .csv or .json");
  CLI::App* verify = app.add_subcommand("verify", "run the acceptance criteria");
  verify->add_option("--config", a.config, "accepted for symmetry, unused");
  verify->add_option("--only", a.only, "comma-separated criterion numbers");

  if (argc > 1 && argv[1][0] != '-') {
    const std::string name = argv[1];
    if (name != "wells" && name != "model" && name != "lattice" && name != "sweep" && name != "verify") {
      std::cerr << "error: unknown subcommand " << name << "\n";
      return 1;
    }
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  Output out;
  try {
    if (verify->parsed()) {
      out = cmd_verify(a);
    } else {
      RunConfig cfg;
      try {
        cfg = load_config(a.config);
      } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
      }
      if (wells->parsed()) out = cmd_wells(cfg, a);
      else if (model->parsed()) out = cmd_model(cfg, a);
      else if (lattice->parsed()) out = cmd_lattice(cfg, a);
      else out = cmd_sweep(cfg, a);
    }
    write_files(out.files);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  if (out.status != 0 && !verify->parsed()) {
    std::cerr << "error: solver did not converge\n";
    return out.status;
  }
  std::cout << out.stdout_text << std::flush;
  return out.status;
}
