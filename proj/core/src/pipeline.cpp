#include "magwell/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "magwell/ladder.hpp"

namespace magwell {

EigResult solve_lattice(const LatticeOperator& op, int k, const SolverSettings& settings,
                        bool renormalized) {
  EigOptions opts;
  opts.k = k;
  opts.tol = settings.tol;
  opts.max_iter = settings.max_iter;
  opts.seed = settings.seed;
  double bound = op.upper_bound();
  if (renormalized) {
    const auto& tau = op.tau_samples();
    bound -= op.p() * *std::min_element(tau.begin(), tau.end());
  }
  opts.upper_bound = bound;
  ApplyFn apply;
  if (renormalized)
    apply = [&op](std::span<const cplx> v, std::span<cplx> out) { renormalized_matvec(op, v, out); };
  else
    apply = [&op](std::span<const cplx> v, std::span<cplx> out) { matvec(op, v, out); };
  return lowest_eigenpairs(apply, op.dimension(), opts);
}

LatticeSpectrum lattice_spectrum(const FieldSpec& field, int p, const std::vector<int>& grids,
                                 int k, const SolverSettings& settings, bool keep_finest_vectors) {
  if (grids.size() < 2) throw std::invalid_argument("need ≥2 grids");
  for (size_t i = 1; i < grids.size(); ++i)
    if (grids[i] != 2 * grids[i - 1]) throw std::invalid_argument("grids not nested/doubling");

  LatticeSpectrum out;
  out.p = p;
  for (size_t g = 0; g < grids.size(); ++g) {
    const LatticeOperator op = build_links(field, p, grids[g], grids[g]);
    EigResult eig = solve_lattice(op, k, settings);
    GridLevels lv;
    lv.grid = grids[g];
    lv.eigenvalues = eig.eigenvalues;
    lv.solver_residuals = eig.residual_norms;
    lv.converged = eig.converged;
    lv.matvecs = eig.matvecs;
    if (keep_finest_vectors && g + 1 == grids.size()) lv.vectors = std::move(eig.eigenvectors);
    out.grids.push_back(std::move(lv));
  }

  const size_t ng = out.grids.size();
  auto richardson = [](double coarse, double fine) { return (4.0 * fine - coarse) / 3.0; };
  for (int j = 0; j < k; ++j) {
    const double fine = out.grids[ng - 1].eigenvalues[j];
    const double coarse = out.grids[ng - 2].eigenvalues[j];
    const double r_fine = richardson(coarse, fine);
    out.extrapolated.push_back(r_fine);
    if (ng >= 3) {
      const double r_coarse = richardson(out.grids[ng - 3].eigenvalues[j], coarse);
      out.extrapolation_error.push_back(std::abs(r_fine - r_coarse) / 15.0);
    } else {
      out.extrapolation_error.push_back(std::abs(fine - coarse) / 3.0);
    }
  }
  return out;
}

std::vector<double> lll_reduce(const LatticeOperator& op, const ClusterPartition& cluster,
                               const EigResult& eigs) {
  if (cluster.count() == 0 || cluster.size(0) == 0) throw std::invalid_argument("empty cluster");
  const int d = cluster.size(0);
  const int first = cluster.ranges[0].first;
  if (eigs.eigenvectors.cols() < first + d) throw std::invalid_argument("missing eigenvectors");
  const auto& tau = op.tau_samples();
  const Eigen::Map<const Eigen::VectorXd> t(tau.data(), static_cast<Eigen::Index>(tau.size()));
  const Eigen::MatrixXcd u = eigs.eigenvectors.middleCols(first, d);
  Eigen::MatrixXcd m = static_cast<double>(op.p()) * (u.adjoint() * (t.asDiagonal() * u));
  for (int i = 0; i < d; ++i) m(i, i) += eigs.eigenvalues[first + i];
  m = 0.5 * (m + m.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
  return {es.eigenvalues().data(), es.eigenvalues().data() + d};
}

std::vector<double> localization_profile(const LatticeOperator& op, const Eigen::VectorXcd& u,
                                         const WellData& well, const std::vector<double>& radii) {
  if (static_cast<size_t>(u.size()) != op.dimension()) throw std::invalid_argument("size mismatch");
  const double total = u.squaredNorm();
  std::vector<double> mass(radii.size(), 0.0);
  for (int j = 0; j < op.n2(); ++j)
    for (int i = 0; i < op.n1(); ++i) {
      const double r = displacement(op.field().torus(), op.site(i, j), well.x0).norm();
      const double w = std::norm(u[static_cast<Eigen::Index>(op.index(i, j))]);
      for (size_t k = 0; k < radii.size(); ++k)
        if (r >= radii[k]) mass[k] += w;
    }
  for (double& m : mass) m /= total;
  return mass;
}

FitResult linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("need >=2 points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  FitResult f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return f;
}

FitResult power_fit(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (size_t i = 0; i < x.size(); ++i) {
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(std::abs(y[i])));
  }
  return linear_fit(lx, ly);
}

InterceptFit intercept_fit(const std::vector<double>& p, const std::vector<double>& r,
                           const std::vector<double>& err) {
  const auto n = static_cast<Eigen::Index>(p.size());
  if (n < 2 || r.size() != p.size() || err.size() != p.size())
    throw std::invalid_argument("intercept fit needs matching data");
  const Eigen::Index cols = n >= 4 ? 3 : 2;
  Eigen::MatrixXd a(n, cols);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    a(i, 0) = 1.0;
    a(i, 1) = 1.0 / p[i];
    if (cols == 3) a(i, 2) = 1.0 / (p[i] * p[i]);
    b[i] = r[i];
  }
  const Eigen::MatrixXd pinv = (a.transpose() * a).ldlt().solve(a.transpose());
  const Eigen::VectorXd c = pinv * b;
  InterceptFit f;
  f.value = c[0];
  f.coefficients.assign(c.data(), c.data() + c.size());
  for (Eigen::Index i = 0; i < n; ++i) f.error_bar += std::abs(pinv(0, i)) * err[i];
  return f;
}

std::string field_hash(const FieldSpec& field) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : field.canonical()) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ModelSide model_side(const FieldSpec& field, int count, const ModelSettings& model) {
  ModelSide side;
  side.wells = find_wells(field);
  ModelEnsemble with, without;
  for (const WellData& w : side.wells) {
    const J12Result j = compute_J12(w, jcal_jet(field, w.x0));
    side.j12.push_back(j.value);
    side.j12_defect = std::max(side.j12_defect, j.scalarity_defect);
    const int cutoff = model.cutoffs.back();
    with.components.push_back(model_operator(w, j.value, cutoff));
    without.components.push_back(model_operator(w, 0.0, cutoff));
    side.per_well.push_back(
        model_spectrum(with.components.back(), count, model.cutoffs, model.tolerance));
  }
  side.levels = ensemble_spectrum(with, count, model.cutoffs, model.tolerance);
  side.levels_no_j12 = ensemble_spectrum(without, count, model.cutoffs, model.tolerance);
  return side;
}

ModelTable model_table(const FieldSpec& field, int count, const ModelSettings& model) {
  const ModelSide side = model_side(field, count, model);
  ModelTable t;
  t.levels = side.levels;
  t.cutoff = model.cutoffs.back();
  std::vector<double> cf, wl;
  for (size_t w = 0; w < side.wells.size(); ++w) {
    const WellData& well = side.wells[w];
    t.convergence = std::max(t.convergence, side.per_well[w].convergence);
    const std::vector<double> ws = williamson_quadratic_spectrum(
        weyl_form_from_well(well.q, well.a), count);
    for (int j = 0; j < count; ++j) {
      cf.push_back(closed_form_n1(well.q, well.tau0, side.j12[w], j));
      wl.push_back(ws[j] + side.j12[w]);
    }
  }
  std::sort(cf.begin(), cf.end());
  std::sort(wl.begin(), wl.end());
  for (size_t j = 0; j < t.levels.size(); ++j) {
    t.closed_form.push_back(cf[j]);
    t.williamson.push_back(wl[j]);
    const double m = t.levels[j].mu;
    t.max_disagreement = std::max(
        {t.max_disagreement, std::abs(m - cf[j]), std::abs(m - wl[j]), std::abs(cf[j] - wl[j])});
  }
  return t;
}

SweepReport sweep(const FieldSpec& field, const std::vector<int>& p_list, int j_count,
                  const std::vector<int>& grids, const SolverSettings& settings,
                  const ModelSettings& model, bool keep_finest_vectors) {
  if (p_list.empty()) throw std::invalid_argument("empty p_list");
  if (p_list.size() < 4) throw std::invalid_argument("p_list needs at least 4 entries");
  for (size_t i = 1; i < p_list.size(); ++i)
    if (p_list[i] <= p_list[i - 1]) throw std::invalid_argument("p_list must be ascending");
  if (j_count < 1) throw std::invalid_argument("j_count must be >= 1");

  SweepReport rep;
  rep.field_hash = field_hash(field);
  const ModelSide side = model_side(field, j_count, model);
  rep.wells = side.wells;
  rep.j12 = side.j12;
  rep.j12_defect = side.j12_defect;
  for (const auto& l : side.levels) rep.mu.push_back(l.mu);
  for (const auto& l : side.levels_no_j12) rep.mu_no_j12.push_back(l.mu);
  rep.p_list = p_list;
  rep.grids = grids;
  rep.settings = settings;
  const double tau0 = rep.wells.front().tau0;

  std::vector<std::vector<double>> abs_res(j_count);
  std::vector<double> ps, r0, e0;
  for (int p : p_list) {
    LatticeSpectrum spec = lattice_spectrum(field, p, grids, j_count, settings, keep_finest_vectors);
    for (int j = 0; j < j_count; ++j) {
      const double resid = spec.extrapolated[j] - p * tau0 - rep.mu[j];
      for (const GridLevels& g : spec.grids) {
        SweepRecord rec;
        rec.p = p;
        rec.grid = g.grid;
        rec.j = j;
        rec.lambda = g.eigenvalues[j];
        rec.lambda_extrap = spec.extrapolated[j];
        rec.mu_model = rep.mu[j];
        rec.residual = resid;
        rec.extrap_error = spec.extrapolation_error[j];
        rec.solver_residual = g.solver_residuals[j];
        rec.flagged = rec.extrap_error > 0.1 * std::abs(resid);
        rep.records.push_back(rec);
      }
      abs_res[j].push_back(resid);
    }
    ps.push_back(p);
    r0.push_back(spec.extrapolated[0] - p * tau0 - rep.mu_no_j12[0]);
    e0.push_back(spec.extrapolation_error[0]);
    rep.spectra.push_back(std::move(spec));
  }
  for (int j = 0; j < j_count; ++j) {
    const FitResult f = power_fit(ps, abs_res[j]);
    rep.fits.push_back({j, f.slope, f.intercept});
  }
  rep.j12_empirical = intercept_fit(ps, r0, e0);
  return rep;
}

GapReport gap_track(const FieldSpec& field, const std::vector<int>& p_list,
                    const std::vector<int>& grids, const SolverSettings& settings, int extra,
                    double gap_factor) {
  if (p_list.empty()) throw std::invalid_argument("empty p_list");
  if (grids.size() != 1 && grids.size() != p_list.size())
    throw std::invalid_argument("need one grid or one grid per p");
  GapReport rep;
  std::vector<double> xs, ys, cls;
  for (size_t i = 0; i < p_list.size(); ++i) {
    GapPoint pt;
    pt.p = p_list[i];
    pt.grid = grids.size() == 1 ? grids[0] : grids[i];
    try {
      const LatticeOperator op = build_links(field, pt.p, pt.grid, pt.grid);
      const int k = pt.p * field.degree() + extra;
      const EigResult eig = solve_lattice(op, k, settings, true);
      const ClusterPartition cp = cluster_detect(eig.eigenvalues, gap_factor);
      pt.first_cluster_size = cp.size(0);
      for (int j = cp.ranges[0].first; j < cp.ranges[0].second; ++j)
        pt.cl_estimate = std::max(pt.cl_estimate, std::abs(eig.eigenvalues[j]));
      if (cp.count() < 2) {
        pt.status = "no second cluster within computed levels";
      } else {
        pt.onset = eig.eigenvalues[cp.ranges[1].first];
        pt.ok = eig.converged;
        pt.status = eig.converged ? "ok" : "unconverged";
      }
    } catch (const std::exception& e) {
      pt.status = e.what();
    }
    if (pt.ok) {
      xs.push_back(pt.p);
      ys.push_back(pt.onset);
      cls.push_back(pt.cl_estimate);
    }
    rep.points.push_back(pt);
  }
  if (xs.size() >= 2) rep.onset_fit = linear_fit(xs, ys);
  if (!cls.empty()) {
    const auto [lo, hi] = std::minmax_element(cls.begin(), cls.end());
    rep.cl_ratio = *lo > 0.0 ? *hi / *lo : INFINITY;
  }
  return rep;
}

}  // namespace magwell
