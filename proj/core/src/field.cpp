#include "magwell/field.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace magwell {

namespace {

constexpr int kCheckGrid = 256;
constexpr int kNewtonMaxIter = 50;

double wave1(const TorusSpec& t, int k) { return kTwoPi * k / t.l1; }
double wave2(const TorusSpec& t, int k) { return kTwoPi * k / t.l2; }

// Integral of exp(i w x) over [x0, x0 + len], written without cancellation.
cplx line_integral(double w, double x0, double len) {
  if (w == 0.0) return {len, 0.0};
  const double half = 0.5 * w * len;
  return std::polar(2.0 * std::sin(half) / w, w * x0 + half);
}

}  // namespace

Eigen::Matrix2d rot90() {
  Eigen::Matrix2d r;
  r << 0.0, -1.0, 1.0, 0.0;
  return r;
}

double FieldSpec::b(const Eigen::Vector2d& x) const {
  double s = b0_;
  for (const auto& m : modes_) {
    const double ph = wave1(torus_, m.k1) * x[0] + wave2(torus_, m.k2) * x[1];
    s += m.amplitude.real() * std::cos(ph) - m.amplitude.imag() * std::sin(ph);
  }
  return s;
}

Eigen::Vector2d FieldSpec::grad_b(const Eigen::Vector2d& x) const {
  Eigen::Vector2d g = Eigen::Vector2d::Zero();
  for (const auto& m : modes_) {
    const double w1 = wave1(torus_, m.k1), w2 = wave2(torus_, m.k2);
    const double ph = w1 * x[0] + w2 * x[1];
    // d/dx Re(c e^{i ph}) = Re(i w c e^{i ph})
    const double s = -m.amplitude.real() * std::sin(ph) - m.amplitude.imag() * std::cos(ph);
    g[0] += w1 * s;
    g[1] += w2 * s;
  }
  return g;
}

Eigen::Matrix2d FieldSpec::hess_b(const Eigen::Vector2d& x) const {
  Eigen::Matrix2d h = Eigen::Matrix2d::Zero();
  for (const auto& m : modes_) {
    const double w1 = wave1(torus_, m.k1), w2 = wave2(torus_, m.k2);
    const double ph = w1 * x[0] + w2 * x[1];
    const double c = -(m.amplitude.real() * std::cos(ph) - m.amplitude.imag() * std::sin(ph));
    h(0, 0) += w1 * w1 * c;
    h(0, 1) += w1 * w2 * c;
    h(1, 1) += w2 * w2 * c;
  }
  h(1, 0) = h(0, 1);
  return h;
}

double FieldSpec::cell_integral(double x0, double y0, double w, double h) const {
  double s = b0_ * w * h;
  for (const auto& m : modes_) {
    const cplx ix = line_integral(wave1(torus_, m.k1), x0, w);
    const cplx iy = line_integral(wave2(torus_, m.k2), y0, h);
    s += (m.amplitude * ix * iy).real();
  }
  return s;
}

Eigen::Matrix2d FieldSpec::j0(const Eigen::Vector2d& x) const {
  return (b(x) / kTwoPi) * rot90();
}

Eigen::Matrix2cd FieldSpec::jcal(const Eigen::Vector2d& x) const {
  return cplx(0.0, -b(x)) * rot90().cast<cplx>();
}

std::string FieldSpec::canonical() const {
  std::ostringstream os;
  char buf[160];
  std::snprintf(buf, sizeof buf, "torus %.17g %.17g\ndegree %d\n", torus_.l1, torus_.l2, degree_);
  os << buf;
  for (const auto& m : modes_) {
    std::snprintf(buf, sizeof buf, "mode %d %d %.17g %.17g\n", m.k1, m.k2, m.amplitude.real(),
                  m.amplitude.imag());
    os << buf;
  }
  return os.str();
}

std::vector<FourierMode> conjugate_closure(const std::vector<FourierMode>& half) {
  std::vector<FourierMode> out;
  out.reserve(2 * half.size());
  for (const auto& m : half) {
    out.push_back(m);
    out.push_back({-m.k1, -m.k2, std::conj(m.amplitude)});
  }
  return out;
}

FieldSpec build_field(const TorusSpec& torus, int degree, std::vector<FourierMode> modes) {
  if (!(torus.l1 > 0.0) || !(torus.l2 > 0.0)) throw std::invalid_argument("invalid torus");
  if (degree < 1) throw std::invalid_argument("degree must be >= 1");

  // Merge repeated wave vectors, then check the conjugate pairing.
  std::map<std::pair<int, int>, cplx> merged;
  for (const auto& m : modes) {
    if (m.k1 == 0 && m.k2 == 0) throw std::invalid_argument("zero mode not allowed");
    merged[{m.k1, m.k2}] += m.amplitude;
  }
  for (const auto& [k, c] : merged) {
    const auto it = merged.find({-k.first, -k.second});
    const double scale = std::max(1.0, std::abs(c));
    if (it == merged.end() || std::abs(it->second - std::conj(c)) > 1e-14 * scale)
      throw std::invalid_argument("field not real");
  }

  FieldSpec f;
  f.torus_ = torus;
  f.degree_ = degree;
  f.b0_ = kTwoPi * degree / torus.area();
  for (const auto& [k, c] : merged) {
    // Symmetrize exactly so B is real to the last bit.
    const cplx partner = merged.at({-k.first, -k.second});
    f.modes_.push_back({k.first, k.second, 0.5 * (c + std::conj(partner))});
  }

  f.b_min_ = f.b0_;
  f.b_max_ = f.b0_;
  for (int i = 0; i < kCheckGrid; ++i) {
    for (int j = 0; j < kCheckGrid; ++j) {
      const Eigen::Vector2d x(torus.l1 * i / kCheckGrid, torus.l2 * j / kCheckGrid);
      const double v = f.b(x);
      f.b_min_ = std::min(f.b_min_, v);
      f.b_max_ = std::max(f.b_max_, v);
    }
  }
  if (!(f.b_min_ > 0.0)) throw std::invalid_argument("degenerate field");
  return f;
}

double intensity_tau(const FieldSpec& field, const Eigen::Vector2d& x) {
  const Eigen::Matrix2d j0 = field.j0(x);
  const Eigen::Matrix2d m = -j0 * j0;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(m);
  const Eigen::Vector2d ev = es.eigenvalues().cwiseMax(0.0);
  return kPi * ev.cwiseSqrt().sum();
}

double total_flux(const FieldSpec& field) {
  constexpr int kCells = 8;
  const auto& t = field.torus();
  const double w = t.l1 / kCells, h = t.l2 / kCells;
  double s = 0.0;
  for (int i = 0; i < kCells; ++i)
    for (int j = 0; j < kCells; ++j) s += field.cell_integral(i * w, j * h, w, h);
  return s;
}

Eigen::Vector2d wrap(const TorusSpec& torus, const Eigen::Vector2d& x) {
  Eigen::Vector2d y(std::fmod(x[0], torus.l1), std::fmod(x[1], torus.l2));
  if (y[0] < 0.0) y[0] += torus.l1;
  if (y[1] < 0.0) y[1] += torus.l2;
  if (y[0] >= torus.l1) y[0] -= torus.l1;
  if (y[1] >= torus.l2) y[1] -= torus.l2;
  return y;
}

Eigen::Vector2d displacement(const TorusSpec& torus, const Eigen::Vector2d& x,
                             const Eigen::Vector2d& y) {
  Eigen::Vector2d d = x - y;
  d[0] -= torus.l1 * std::round(d[0] / torus.l1);
  d[1] -= torus.l2 * std::round(d[1] / torus.l2);
  return d;
}

namespace {

bool positive_definite(const Eigen::Matrix2d& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(h);
  const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  return es.eigenvalues().minCoeff() > 1e-10 * scale;
}

struct Candidate {
  Eigen::Vector2d x;
  double tau;
  bool nondegenerate;
};

}  // namespace

std::vector<WellData> find_wells(const FieldSpec& field, int scan_n, double newton_tol) {
  if (scan_n < 64) throw std::invalid_argument("scan_n must be >= 64");
  if (!(newton_tol > 0.0)) throw std::invalid_argument("newton_tol must be positive");
  const auto& t = field.torus();
  const int n = scan_n;

  std::vector<double> grid(static_cast<size_t>(n) * n);
  auto at = [&](int i, int j) -> double& {
    return grid[static_cast<size_t>((i + n) % n) * n + (j + n) % n];
  };
  auto point = [&](int i, int j) { return Eigen::Vector2d(t.l1 * i / n, t.l2 * j / n); };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) at(i, j) = intensity_tau(field, point(i, j));

  const auto [lo, hi] = std::minmax_element(grid.begin(), grid.end());
  if (*hi - *lo <= 1e-12 * std::abs(*hi))
    throw std::runtime_error("no nondegenerate well");

  std::vector<Candidate> cands;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double v = at(i, j);
      bool is_min = true;
      for (int di = -1; di <= 1 && is_min; ++di)
        for (int dj = -1; dj <= 1; ++dj)
          if ((di || dj) && at(i + di, j + dj) < v) {
            is_min = false;
            break;
          }
      if (!is_min) continue;

      Eigen::Vector2d x = point(i, j);
      if (!positive_definite(field.hess_b(x))) {
        cands.push_back({x, v, false});
        continue;
      }
      bool ok = false;
      for (int it = 0; it < kNewtonMaxIter; ++it) {
        const Eigen::Vector2d g = field.grad_b(x);
        if (g.norm() <= newton_tol) {
          ok = true;
          break;
        }
        const Eigen::Matrix2d h = field.hess_b(x);
        if (!positive_definite(h)) break;
        const Eigen::Vector2d step = h.ldlt().solve(g);
        if (!step.allFinite() || step.norm() > 0.5 * std::min(t.l1, t.l2)) break;
        x -= step;
      }
      if (!ok) {
        char msg[96];
        std::snprintf(msg, sizeof msg, "refinement failed at seed (%d,%d)", i, j);
        throw std::runtime_error(msg);
      }
      x = wrap(t, x);
      cands.push_back({x, intensity_tau(field, x), positive_definite(field.hess_b(x))});
    }
  }

  double tau_min = cands.front().tau;
  for (const auto& c : cands) tau_min = std::min(tau_min, c.tau);

  std::vector<WellData> wells;
  for (const auto& c : cands) {
    if (c.tau > tau_min + 1e-9 * std::abs(tau_min) || !c.nondegenerate) continue;
    const bool dup = std::any_of(wells.begin(), wells.end(), [&](const WellData& w) {
      return displacement(t, w.x0, c.x).norm() < 1e-7;
    });
    if (dup) continue;
    WellData w;
    w.x0 = c.x;
    w.tau0 = c.tau;
    w.hess = field.hess_b(c.x);
    w.q = 0.5 * w.hess;
    w.a = {field.b(c.x)};
    w.gradient_norm = field.grad_b(c.x).norm();
    wells.push_back(std::move(w));
  }
  if (wells.empty()) throw std::runtime_error("no nondegenerate well");

  std::sort(wells.begin(), wells.end(), [](const WellData& a, const WellData& b) {
    if (a.x0[0] != b.x0[0]) return a.x0[0] < b.x0[0];
    return a.x0[1] < b.x0[1];
  });
  return wells;
}

JcalJet jcal_jet(const FieldSpec& field, const Eigen::Vector2d& x) {
  const Eigen::Matrix2cd r = cplx(0.0, -1.0) * rot90().cast<cplx>();
  const Eigen::Vector2d g = field.grad_b(x);
  const Eigen::Matrix2d h = field.hess_b(x);
  JcalJet jet;
  for (int k = 0; k < 2; ++k) {
    jet.d1[k] = g[k] * r;
    for (int l = 0; l < 2; ++l) jet.d2[k][l] = h(k, l) * r;
  }
  return jet;
}

}  // namespace magwell
