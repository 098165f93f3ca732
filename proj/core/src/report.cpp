#include "magwell/report.hpp"

#include <charconv>
#include <sstream>

#include <json.hpp>

namespace magwell {

namespace {

using nlohmann::ordered_json;

ordered_json well_json(const WellData& w) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(w.hess);
  return {{"x0", {w.x0.x(), w.x0.y()}},
          {"tau0", w.tau0},
          {"hess", {{w.hess(0, 0), w.hess(0, 1)}, {w.hess(1, 0), w.hess(1, 1)}}},
          {"hess_eigenvalues", {es.eigenvalues()[0], es.eigenvalues()[1]}},
          {"a", w.a},
          {"gradient_norm", w.gradient_norm}};
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

}  // namespace

std::string format_double(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, r.ptr);
}

std::string sweep_csv(const SweepReport& rep) {
  std::ostringstream os;
  os << "p,grid,j,lambda,lambda_extrap,mu_model,residual,solver_residual\n";
  for (const SweepRecord& r : rep.records)
    os << r.p << ',' << r.grid << ',' << r.j << ',' << format_double(r.lambda) << ','
       << format_double(r.lambda_extrap) << ',' << format_double(r.mu_model) << ','
       << format_double(r.residual) << ',' << format_double(r.solver_residual) << '\n';
  return os.str();
}

std::string sweep_json(const SweepReport& rep) {
  ordered_json j;
  j["field_hash"] = rep.field_hash;
  j["wells"] = ordered_json::array();
  for (const WellData& w : rep.wells) j["wells"].push_back(well_json(w));
  j["j12"] = rep.j12;
  j["j12_scalarity_defect"] = rep.j12_defect;
  j["mu"] = rep.mu;
  j["mu_no_j12"] = rep.mu_no_j12;
  j["records"] = ordered_json::array();
  for (const SweepRecord& r : rep.records)
    j["records"].push_back({{"p", r.p},
                            {"grid", r.grid},
                            {"j", r.j},
                            {"lambda", r.lambda},
                            {"lambda_extrap", r.lambda_extrap},
                            {"mu_model", r.mu_model},
                            {"residual", r.residual},
                            {"extrap_error", r.extrap_error},
                            {"solver_residual", r.solver_residual},
                            {"flagged", r.flagged}});
  j["fits"] = ordered_json::array();
  for (const LevelFit& f : rep.fits)
    j["fits"].push_back({{"j", f.j}, {"slope", f.slope}, {"log_c", f.log_c}});
  j["j12_empirical"] = {{"value", rep.j12_empirical.value},
                        {"error_bar", rep.j12_empirical.error_bar},
                        {"coefficients", rep.j12_empirical.coefficients}};
  j["settings"] = {{"p_list", rep.p_list},
                   {"grids", rep.grids},
                   {"tol", rep.settings.tol},
                   {"max_iter", rep.settings.max_iter},
                   {"seed", rep.settings.seed}};
  return dump(j);
}

std::string model_csv(const ModelTable& t) {
  std::ostringstream os;
  os << "j,mu,cutoff,convergence\n";
  for (size_t j = 0; j < t.levels.size(); ++j)
    os << j << ',' << format_double(t.levels[j].mu) << ',' << t.cutoff << ','
       << format_double(t.convergence) << '\n';
  return os.str();
}

std::string model_json(const ModelTable& t) {
  ordered_json j;
  j["cutoff"] = t.cutoff;
  j["convergence"] = t.convergence;
  j["max_disagreement"] = t.max_disagreement;
  j["levels"] = ordered_json::array();
  for (size_t k = 0; k < t.levels.size(); ++k)
    j["levels"].push_back({{"j", k},
                           {"mu", t.levels[k].mu},
                           {"well", t.levels[k].well},
                           {"closed_form", t.closed_form[k]},
                           {"williamson", t.williamson[k]}});
  return dump(j);
}

std::string wells_csv(const std::vector<WellData>& wells) {
  std::ostringstream os;
  os << "well,x,y,tau0,hess_eig1,hess_eig2\n";
  for (size_t k = 0; k < wells.size(); ++k) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(wells[k].hess);
    os << k << ',' << format_double(wells[k].x0.x()) << ',' << format_double(wells[k].x0.y())
       << ',' << format_double(wells[k].tau0) << ',' << format_double(es.eigenvalues()[0]) << ','
       << format_double(es.eigenvalues()[1]) << '\n';
  }
  return os.str();
}

std::string wells_json(const std::vector<WellData>& wells) {
  ordered_json j = ordered_json::array();
  for (const WellData& w : wells) j.push_back(well_json(w));
  return dump(j);
}

std::string lattice_csv(const EigResult& eig) {
  std::ostringstream os;
  os << "j,lambda,solver_residual\n";
  for (size_t k = 0; k < eig.eigenvalues.size(); ++k)
    os << k << ',' << format_double(eig.eigenvalues[k]) << ','
       << format_double(eig.residual_norms[k]) << '\n';
  return os.str();
}

std::string lattice_json(const EigResult& eig, int p, int n1, int n2) {
  ordered_json j;
  j["p"] = p;
  j["grid"] = {n1, n2};
  j["eigenvalues"] = eig.eigenvalues;
  j["residual_norms"] = eig.residual_norms;
  j["status"] = eig.status;
  j["matvecs"] = eig.matvecs;
  j["seed"] = eig.seed;
  return dump(j);
}

}  // namespace magwell
