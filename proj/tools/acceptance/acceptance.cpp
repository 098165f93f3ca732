#include "acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

#include "magwell/ladder.hpp"
#include "magwell/pipeline.hpp"
#include "oracles.hpp"

namespace magwell {

namespace {

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string join(const std::vector<double>& v, const char* f = "%.3g") {
  std::string s = "[";
  for (size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(f, v[i]);
  return s + "]";
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (size_t i = 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1])) return false;
  return true;
}

FieldSpec two_mode_field() {
  return build_field({1.0, 1.0}, 1, conjugate_closure({{1, 0, {0.5, 0.0}}, {0, 1, {0.5, 0.0}}}));
}

const std::vector<int> kSweepP{16, 32, 64, 128, 256};

class Suite {
 public:
  explicit Suite(std::ostream* log) : log_(log) {}

  CriterionResult c1();
  CriterionResult c2();
  CriterionResult c3();
  CriterionResult c4();
  CriterionResult c5();
  CriterionResult c6();
  CriterionResult c7();
  CriterionResult c8();
  CriterionResult c9();

 private:
  void note(const std::string& s) const {
    if (log_) *log_ << "  .. " << s << std::endl;
  }

  // Two-mode sweep on grids {128, 256, 512}; the 128 grid only feeds the
  // extrapolation error estimate. Finest-grid vectors are kept for 6 and 7.
  const SweepReport& sweep_cache() {
    if (!sweep_) {
      note("running two-mode sweep, p in {16..256}, grids {128, 256, 512}");
      sweep_ = sweep(field_, kSweepP, 3, {128, 256, 512}, {1e-8, 5000, 12345}, {}, true);
    }
    return *sweep_;
  }

  std::ostream* log_;
  FieldSpec field_ = two_mode_field();
  std::optional<SweepReport> sweep_;
};

CriterionResult Suite::c1() {
  CriterionResult r{1, "model-oracle agreement", false, {}, 0.0};
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> angle(0.0, kPi), eig(1.0, 10.0), tau(1.0, 10.0);
  const std::vector<int> cutoffs{32, 48, 64, 80};
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const double t = angle(rng);
    Eigen::Matrix2d rot;
    rot << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
    const Eigen::Matrix2d hess = rot * Eigen::Vector2d(eig(rng), eig(rng)).asDiagonal() * rot.transpose();
    const double tau0 = tau(rng);
    const Eigen::Matrix2d q = 0.5 * hess;
    const ModelOperator op = model_operator(q, {tau0}, 0.0, cutoffs.back());
    const ModelSpectrum fock = model_spectrum(op, 8, cutoffs, 1e-9);
    const std::vector<double> will = williamson_quadratic_spectrum(weyl_form_from_well(q, {tau0}), 8);
    for (int j = 0; j < 8; ++j) {
      const double cf = closed_form_n1(q, tau0, 0.0, j);
      worst = std::max({worst, std::abs(fock.mu[j] - cf), std::abs(fock.mu[j] - will[j]),
                        std::abs(cf - will[j])});
    }
  }
  r.pass = worst <= 1e-8;
  r.detail = "max pairwise |diff| = " + fmt("%.2e", worst) + " (limit 1e-8)";
  return r;
}

CriterionResult Suite::c2() {
  CriterionResult r{2, "gauge invariance", false, {}, 0.0};
  const SolverSettings s{1e-8, 5000, 7};
  const LatticeOperator op = build_links(field_, 16, 128, 128);
  const EigResult base = solve_lattice(op, 8, s);
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> ph(0.0, kTwoPi);
  double worst = 0.0;
  bool converged = base.converged;
  for (int t = 0; t < 5; ++t) {
    std::vector<cplx> g(op.dimension());
    for (auto& z : g) z = std::polar(1.0, ph(rng));
    const EigResult e = solve_lattice(gauge_transform(op, g), 8, {s.tol, s.max_iter, s.seed + t + 1});
    converged = converged && e.converged;
    for (int j = 0; j < 8; ++j) worst = std::max(worst, std::abs(e.eigenvalues[j] - base.eigenvalues[j]));
  }
  r.pass = converged && worst <= 1e-9;
  r.detail = "max |dlambda| over 5 gauges = " + fmt("%.2e", worst) + " (limit 1e-9)" +
             (converged ? "" : ", solver unconverged");
  return r;
}

CriterionResult Suite::c3() {
  CriterionResult r{3, "constant-field Landau check", false, {}, 0.0};
  const FieldSpec f = build_field({1.0, 1.0}, 1, {});
  const std::vector<int> grids{32, 64, 128, 256};
  bool pass = true;
  std::ostringstream det;
  for (int p : {4, 8}) {
    const double pb = p * f.b0();
    std::vector<double> means, spacing;
    std::vector<int> sizes;
    for (int n : grids) {
      const LatticeOperator op = build_links(f, p, n, n);
      const EigResult e = solve_lattice(op, p + 4, {1e-8, 5000, 11}, true);
      const ClusterPartition cp = cluster_detect(e.eigenvalues);
      sizes.push_back(cp.size(0));
      double m = 0.0;
      for (int j = cp.ranges[0].first; j < cp.ranges[0].second; ++j) m += e.eigenvalues[j];
      means.push_back(m / cp.size(0) + pb);
      spacing.push_back(op.a1());
      pass = pass && e.converged;
    }
    const double extrap = (4.0 * means[3] - means[2]) / 3.0;
    const double rel = std::abs(extrap - pb) / pb;
    std::vector<double> la, ld;
    for (size_t g = 0; g + 1 < means.size(); ++g) {
      la.push_back(std::log(spacing[g]));
      ld.push_back(std::log(std::abs(means[g + 1] - means[g])));
    }
    const double slope = linear_fit(la, ld).slope;
    const bool sizes_ok = std::all_of(sizes.begin(), sizes.end(), [p](int s) { return s == p; });
    pass = pass && sizes_ok && rel < 0.005 && std::abs(slope - 2.0) <= 0.3;
    det << "p=" << p << ": cluster sizes " << join({sizes.begin(), sizes.end()}, "%.0f")
        << ", extrapolated mean rel err " << fmt("%.2e", rel) << ", order slope "
        << fmt("%.3f", slope) << "; ";
  }
  r.pass = pass;
  r.detail = det.str();
  return r;
}

CriterionResult Suite::c4() {
  CriterionResult r{4, "level asymptotics", false, {}, 0.0};
  const SweepReport& rep = sweep_cache();
  const ModelSide side = model_side(field_, 4);
  std::ostringstream det;
  bool pass = true;
  for (int j = 0; j < 3; ++j) {
    std::vector<double> res;
    for (size_t i = 0; i < rep.spectra.size(); ++i) res.push_back(std::abs(rep.spectra[i].extrapolated[j] - kSweepP[i] * rep.wells[0].tau0 - rep.mu[j]));
    const double spacing = side.levels[j + 1].mu - side.levels[j].mu;
    const double rel = res.back() / spacing;
    const double slope = rep.fits[j].slope;
    const bool dec = strictly_decreasing(res);
    pass = pass && dec && rel < 0.05 && slope <= -0.4;
    det << "j=" << j << ": |r| " << join(res) << (dec ? " decreasing" : " NOT decreasing")
        << ", |r(256)|/spacing " << fmt("%.3f", rel) << ", slope " << fmt("%.3f", slope) << "; ";
  }
  const double jcalc = rep.j12[0];
  const InterceptFit& emp = rep.j12_empirical;
  const bool j12_ok = std::abs(jcalc - emp.value) <= emp.error_bar;
  pass = pass && j12_ok;
  det << "J12 calculus " << fmt("%.3g", jcalc) << " vs sweep intercept " << fmt("%.4f", emp.value)
      << " +/- " << fmt("%.4f", emp.error_bar) << (j12_ok ? " (agree)" : " (disagree)");
  r.pass = pass;
  r.detail = det.str();
  return r;
}

CriterionResult Suite::c5() {
  CriterionResult r{5, "LLL reduction", false, {}, 0.0};
  bool dominated = true, converged = true;
  std::vector<double> gaps;
  double worst_violation = -INFINITY;
  for (int p : {16, 32, 64}) {
    const LatticeOperator op = build_links(field_, p, 128, 128);
    const int pd = p * field_.degree();
    const EigResult ren = solve_lattice(op, pd + 6, {1e-8, 5000, 5}, true);
    const ClusterPartition cp = cluster_detect(ren.eigenvalues);
    const std::vector<double> reduced = lll_reduce(op, cp, ren);
    const EigResult full = solve_lattice(op, static_cast<int>(reduced.size()), {1e-8, 5000, 6});
    converged = converged && ren.converged && full.converged;
    double g = 0.0;
    for (size_t j = 0; j < reduced.size(); ++j) {
      worst_violation = std::max(worst_violation, full.eigenvalues[j] - reduced[j]);
      dominated = dominated && reduced[j] >= full.eigenvalues[j] - 1e-8;
      if (j < 4) g = std::max(g, std::abs(reduced[j] - full.eigenvalues[j]));
    }
    gaps.push_back(g);
    note("p=" + std::to_string(p) + " cluster " + std::to_string(cp.size(0)) + " max_{j<4} gap " + fmt("%.3e", g));
  }
  const bool dec = strictly_decreasing(gaps);
  r.pass = converged && dominated && dec;
  r.detail = "max(lambda_full - lambda_reduced) = " + fmt("%.2e", worst_violation) +
             ", max_{j<4}|diff| over p=16,32,64: " + join(gaps) + (dec ? " decreasing" : " NOT decreasing") +
             (converged ? "" : ", solver unconverged");
  return r;
}

CriterionResult Suite::c6() {
  CriterionResult r{6, "localization", false, {}, 0.0};
  const SweepReport& rep = sweep_cache();
  std::vector<double> mass;
  for (size_t i = 0; i < kSweepP.size(); ++i) {
    const int p = kSweepP[i];
    const GridLevels& g = rep.spectra[i].grids.back();
    const LatticeOperator op = build_links(field_, p, g.grid, g.grid);
    const double radius = std::pow(p, -0.15);
    mass.push_back(localization_profile(op, g.vectors.col(0), rep.wells[0], {radius})[0]);
  }
  const bool dec = strictly_decreasing(mass);
  r.pass = dec && mass.back() < 1e-3;
  r.detail = "mass outside p^-0.15 for p=16..256: " + join(mass, "%.2e") + (dec ? " decreasing" : " NOT decreasing");
  return r;
}

CriterionResult Suite::c7() {
  CriterionResult r{7, "quasimode suite", false, {}, 0.0};
  const SweepReport& rep = sweep_cache();
  const ModelSide side = model_side(field_, 1);
  const ModelSpectrum& ms = side.per_well[0];
  const WellData& well = rep.wells[0];
  bool above = true;
  std::vector<double> shifted, resid, ps;
  for (size_t i = 0; i < kSweepP.size(); ++i) {
    const int p = kSweepP[i];
    const GridLevels& g = rep.spectra[i].grids.back();
    const LatticeOperator op = build_links(field_, p, g.grid, g.grid);
    const QuasimodeResult q = quasimode_rq(op, well, ms.basis, ms.vectors.col(0));
    above = above && q.rayleigh_quotient >= g.eigenvalues[0] - 1e-8;
    shifted.push_back(std::abs(q.rayleigh_quotient - p * well.tau0));
    resid.push_back(q.residual_norm);
    ps.push_back(p);
  }
  const double ratio = *std::max_element(shifted.begin(), shifted.end()) /
                       *std::min_element(shifted.begin(), shifted.end());
  const double slope = power_fit(ps, resid).slope;
  r.pass = above && ratio < 10.0 && slope >= 0.3 && slope <= 0.7;
  r.detail = std::string(above ? "RQ >= lambda0 at all p" : "RQ < lambda0 somewhere") +
             ", |RQ - p tau0| " + join(shifted) + " ratio " + fmt("%.2f", ratio) + ", residual " +
             join(resid) + " slope " + fmt("%.3f", slope) + " (window [0.3, 0.7])";
  return r;
}

CriterionResult Suite::c8() {
  CriterionResult r{8, "spectral gap", false, {}, 0.0};
  const GapReport g = gap_track(field_, kSweepP, {256}, {1e-6, 5000, 3}, 6, 10.0);
  bool ok = true;
  std::vector<double> cl, onset;
  for (const GapPoint& pt : g.points) {
    ok = ok && pt.ok;
    cl.push_back(pt.cl_estimate);
    onset.push_back(pt.onset);
    note("p=" + std::to_string(pt.p) + " cluster " + std::to_string(pt.first_cluster_size) + " C_L " +
         fmt("%.3f", pt.cl_estimate) + " onset " + fmt("%.2f", pt.onset) + " " + pt.status);
  }
  r.pass = ok && g.cl_ratio < 5.0 && g.onset_fit.r_squared > 0.99 && g.onset_fit.slope > 0.0;
  r.detail = "C_L " + join(cl) + " ratio " + fmt("%.2f", g.cl_ratio) + ", onset " + join(onset, "%.1f") +
             " slope " + fmt("%.3f", g.onset_fit.slope) + " R^2 " + fmt("%.5f", g.onset_fit.r_squared);
  return r;
}

CriterionResult Suite::c9() {
  CriterionResult r{9, "unit/property suites", false, {}, 0.0};
  std::ostringstream det;
  bool pass = true;
  std::mt19937_64 rng(777);
  std::uniform_real_distribution<double> u(-1.0, 1.0);

  // Bergman reproducing property by tensor Gauss-Hermite quadrature.
  {
    const double a = 2.0;
    const oracle::Rule gh = oracle::gauss_hermite(80);
    const double s = std::sqrt(2.0 / a);  // exp(-a|w|^2/2) = exp(-(x^2+y^2)) in w = s (x, y)
    double worst = 0.0;
    for (int t = 0; t < 10; ++t) {
      const Eigen::Vector2d z(u(rng), u(rng)), zp(u(rng), u(rng));
      cplx acc = 0.0;
      for (size_t i = 0; i < gh.nodes.size(); ++i)
        for (size_t k = 0; k < gh.nodes.size(); ++k) {
          const Eigen::Vector2d w(s * gh.nodes[i], s * gh.nodes[k]);
          const double gauss = std::exp(-0.5 * a * w.squaredNorm());
          acc += gh.weights[i] * gh.weights[k] * s * s *
                 bergman_kernel({a}, z, w) * bergman_kernel({a}, w, zp) / gauss;
        }
      worst = std::max(worst, std::abs(acc - bergman_kernel({a}, z, zp)));
    }
    pass = pass && worst <= 1e-8;
    det << "Bergman reproducing " << fmt("%.1e", worst) << "; ";
  }

  // Ladder commutators on random elements of degree <= 6.
  {
    const std::vector<double> a{2.5};
    double worst = 0.0, worst_l = 0.0, worst_z = 0.0;
    std::uniform_int_distribution<int> deg(0, 6);
    for (int t = 0; t < 10; ++t) {
      LadderElement f(a);
      for (int term = 0; term < 4; ++term) f.add({deg(rng)}, {deg(rng)}, cplx(u(rng), u(rng)));
      const LadderElement comm = apply_b(apply_b_plus(f, 0), 0) + apply_b_plus(apply_b(f, 0), 0) * -1.0;
      const LadderElement diff = comm + f * (2.0 * a[0]);
      worst = std::max(worst, diff.max_abs() / f.max_abs());
      const LadderElement ldiff = apply_L(f) + apply_b(apply_b_plus(f, 0), 0) * -1.0;
      worst_l = std::max(worst_l, ldiff.max_abs() / f.max_abs());
      // [b, z] = -2 and [b+, zbar] = 2 tie the multiplication operators to the ladder.
      const LadderElement bz = apply_b(multiply_z(f, 0), 0) + multiply_z(apply_b(f, 0), 0) * -1.0 + f * 2.0;
      const LadderElement bpzb =
          apply_b_plus(multiply_zbar(f, 0), 0) + multiply_zbar(apply_b_plus(f, 0), 0) * -1.0 + f * -2.0;
      worst_z = std::max({worst_z, bz.max_abs() / f.max_abs(), bpzb.max_abs() / f.max_abs()});
    }
    pass = pass && worst <= 1e-12 && worst_l <= 1e-12 && worst_z <= 1e-12;
    det << "[b,b+] + 2a " << fmt("%.1e", worst) << ", L - b b+ " << fmt("%.1e", worst_l)
        << ", [b,z] + 2 and [b+,zbar] - 2 " << fmt("%.1e", worst_z) << "; ";
  }

  // Toeplitz Hermiticity and min-max monotonicity.
  {
    const FockBasis basis = lll_basis({3.0}, 24);
    double herm = 0.0, mono = -INFINITY;
    for (int t = 0; t < 10; ++t) {
      Eigen::Matrix2d m1, m2;
      m1 << u(rng), u(rng), u(rng), u(rng);
      m2 << u(rng), u(rng), u(rng), u(rng);
      const Eigen::Matrix2d q1 = m1 * m1.transpose() + 0.5 * Eigen::Matrix2d::Identity();
      const Eigen::Matrix2d q2 = q1 + 0.5 * m2 * m2.transpose();
      ComplexPolynomial s1 = ComplexPolynomial::quadratic_form(q1);
      s1 += ComplexPolynomial::constant(1, u(rng));
      const Eigen::MatrixXcd t1 = toeplitz_matrix(basis, s1);
      herm = std::max(herm, (t1 - t1.adjoint()).cwiseAbs().maxCoeff());
      const ModelSpectrum lo = model_spectrum(model_operator(q1, {3.0}, 0.0, 80), 6, {48, 64, 80}, 1e-9);
      const ModelSpectrum hi = model_spectrum(model_operator(q2, {3.0}, 0.0, 80), 6, {48, 64, 80}, 1e-9);
      for (int j = 0; j < 6; ++j) mono = std::max(mono, lo.mu[j] - hi.mu[j]);
    }
    pass = pass && herm <= 1e-12 && mono <= 1e-10;
    det << "Toeplitz Hermitian " << fmt("%.1e", herm) << ", monotone max(mu1-mu2) " << fmt("%.1e", mono) << "; ";
  }

  // Eigensolver residual and orthonormality contracts.
  {
    const double tol = 1e-8;
    bool ok = true;
    double worst_res = 0.0, worst_gram = 0.0, worst_val = 0.0;
    auto check = [&](const EigResult& e, const std::vector<double>& expect) {
      ok = ok && e.converged;
      for (size_t j = 0; j < expect.size(); ++j) {
        worst_res = std::max(worst_res, e.residual_norms[j]);
        worst_val = std::max(worst_val, std::abs(e.eigenvalues[j] - expect[j]) / std::max(1.0, std::abs(expect[j])));
      }
      const auto k = e.eigenvectors.cols();
      worst_gram = std::max(worst_gram, (e.eigenvectors.adjoint() * e.eigenvectors -
                                         Eigen::MatrixXcd::Identity(k, k)).cwiseAbs().maxCoeff());
    };
    EigOptions o;
    o.k = 3;
    o.tol = tol;
    o.dense_threshold = 0;
    check(lowest_eigenpairs(
              [](std::span<const cplx> v, std::span<cplx> w) {
                for (size_t i = 0; i < v.size(); ++i) w[i] = static_cast<double>(i + 1) * v[i];
              },
              100, o),
          {1.0, 2.0, 3.0});
    const int n = 64;
    std::vector<cplx> ones(static_cast<size_t>(n) * n, 1.0);
    const FieldSpec flat = build_field({1.0, 1.0}, 1, {});
    const LatticeOperator free_op(flat, 1, n, n, ones, ones);
    o.k = 4;
    const double l1 = oracle::discrete_laplacian_mode(1, n, 1.0 / n);
    check(lowest_eigenpairs([&](std::span<const cplx> v, std::span<cplx> w) { matvec(free_op, v, w); },
                            free_op.dimension(), o),
          {0.0, l1, l1, l1});
    ok = ok && worst_res <= tol && worst_gram <= 1e-10 && worst_val <= 1e-9;
    pass = pass && ok;
    det << "eigensolver residual " << fmt("%.1e", worst_res) << ", Gram " << fmt("%.1e", worst_gram)
        << ", value err " << fmt("%.1e", worst_val);
  }
  r.pass = pass;
  r.detail = det.str();
  return r;
}

}  // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts) {
  Suite suite(opts.log);
  const std::vector<std::function<CriterionResult()>> all{
      [&] { return suite.c1(); }, [&] { return suite.c2(); }, [&] { return suite.c3(); },
      [&] { return suite.c4(); }, [&] { return suite.c5(); }, [&] { return suite.c6(); },
      [&] { return suite.c7(); }, [&] { return suite.c8(); }, [&] { return suite.c9(); }};
  static const char* const names[] = {"model-oracle agreement", "gauge invariance",
                                      "constant-field Landau check", "level asymptotics",
                                      "LLL reduction", "localization", "quasimode suite",
                                      "spectral gap", "unit/property suites"};
  // Wall-clock limits in seconds; 0 means none. The shared sweep is charged to 4.
  static const double budget[] = {10, 60, 300, 3600, 900, 0, 0, 0, 120};
  std::vector<CriterionResult> out;
  for (size_t i = 0; i < all.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!opts.only.empty() && !opts.only.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    CriterionResult r;
    try {
      r = all[i]();
    } catch (const std::exception& e) {
      r.id = id;
      r.name = names[i];
      r.pass = false;
      r.detail = std::string("error: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (budget[i] > 0 && r.seconds > budget[i]) {
      r.pass = false;
      r.detail += "; over the " + std::to_string(static_cast<int>(budget[i])) + " s runtime limit";
    }
    if (opts.log) *opts.log << format_result(r) << std::endl;
    out.push_back(r);
  }
  return out;
}

std::string format_result(const CriterionResult& r) {
  char t[32];
  std::snprintf(t, sizeof t, "%.1f", r.seconds);
  return std::string(r.pass ? "PASS" : "FAIL") + " [" + std::to_string(r.id) + "] " + r.name + ": " +
         r.detail + " (" + t + " s)";
}

}  // namespace magwell
