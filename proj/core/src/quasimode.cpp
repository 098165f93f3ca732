#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "magwell/pipeline.hpp"

namespace magwell {

namespace {

struct GaussRule {
  std::vector<double> nodes;  // on [0, 1]
  std::vector<double> weights;
};

// Golub-Welsch for Gauss-Legendre, mapped to [0, 1].
GaussRule gauss_legendre(int n) {
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    jac(k, k - 1) = jac(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);
  GaussRule r;
  for (int k = 0; k < n; ++k) {
    const double v = es.eigenvectors()(0, k);
    r.nodes.push_back(0.5 * (es.eigenvalues()[k] + 1.0));
    r.weights.push_back(v * v);  // 2 v^2 on [-1, 1], halved
  }
  return r;
}

// Radial-gauge potential around x0: A(Z) = h(Z) rot90 Z, h = int_0^1 s B(x0 + s Z) ds.
class RadialGauge {
 public:
  RadialGauge(const FieldSpec& field, const Eigen::Vector2d& x0)
      : field_(field), x0_(x0), radial_(gauss_legendre(16)), edge_(gauss_legendre(8)) {}

  Eigen::Vector2d potential(const Eigen::Vector2d& z) const {
    double h = 0.0;
    for (size_t k = 0; k < radial_.nodes.size(); ++k) {
      const double s = radial_.nodes[k];
      h += radial_.weights[k] * s * field_.b(x0_ + s * z);
    }
    return h * Eigen::Vector2d(-z.y(), z.x());
  }

  // int A . dl along the straight edge z -> z + d.
  double edge_integral(const Eigen::Vector2d& z, const Eigen::Vector2d& d) const {
    double acc = 0.0;
    for (size_t k = 0; k < edge_.nodes.size(); ++k)
      acc += edge_.weights[k] * potential(z + edge_.nodes[k] * d).dot(d);
    return acc;
  }

 private:
  const FieldSpec& field_;
  Eigen::Vector2d x0_;
  GaussRule radial_, edge_;
};

// Quintic smoothstep: 1 for r <= R/2, 0 for r >= R.
double cutoff(double r, double radius) {
  const double s = std::clamp((radius - r) / (0.5 * radius), 0.0, 1.0);
  return s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
}

}  // namespace

QuasimodeResult quasimode_rq(const LatticeOperator& op, const WellData& well,
                             const FockBasis& basis, const Eigen::VectorXcd& coeffs) {
  if (basis.n != 1) throw std::invalid_argument("quasimode needs a one-dimensional model basis");
  if (static_cast<size_t>(coeffs.size()) != basis.dimension())
    throw std::invalid_argument("coefficient size mismatch");
  const FieldSpec& field = op.field();
  const TorusSpec& torus = field.torus();
  const int p = op.p(), n1 = op.n1(), n2 = op.n2();
  const double a1 = op.a1(), a2 = op.a2();

  QuasimodeResult res;
  const double ell = 1.0 / std::sqrt(p * well.tau0);
  res.points_per_length = ell / std::max(a1, a2);
  if (res.points_per_length < 8.0)
    throw std::invalid_argument("under-resolved Gaussian: fewer than 8 grid points per magnetic length");

  const double radius = 0.45 * std::min(torus.l1, torus.l2);
  const int i0 = static_cast<int>(std::lround(well.x0.x() / a1));
  const int j0 = static_cast<int>(std::lround(well.x0.y() / a2));
  const int hw1 = static_cast<int>(std::ceil(radius / a1)) + 1;
  const int hw2 = static_cast<int>(std::ceil(radius / a2)) + 1;
  if (2 * hw1 >= n1 || 2 * hw2 >= n2) throw std::invalid_argument("cutoff disk wraps the torus");

  // Box coordinates (di, dj) in [-hw, hw]; links transported from the torus
  // links to the radial gauge by a tree gauge rooted at the site nearest x0.
  const int w1 = 2 * hw1 + 1, w2 = 2 * hw2 + 1;
  auto wrapi = [](int i, int n) { return ((i % n) + n) % n; };
  auto rel = [&](int di, int dj) {
    return displacement(torus, op.site(wrapi(i0 + di, n1), wrapi(j0 + dj, n2)), well.x0);
  };
  const RadialGauge gauge(field, well.x0);
  const Eigen::Vector2d e1(a1, 0.0), e2(0.0, a2);
  auto radial_link = [&](int di, int dj, const Eigen::Vector2d& d) {
    const double phase = -p * gauge.edge_integral(rel(di, dj), d);
    return cplx(std::cos(phase), std::sin(phase));
  };

  std::vector<cplx> g(static_cast<size_t>(w1) * w2);
  auto gat = [&](int di, int dj) -> cplx& {
    return g[static_cast<size_t>(dj + hw2) * w1 + (di + hw1)];
  };
  auto link1 = [&](int di, int dj) {
    return op.u1()[op.index(wrapi(i0 + di, n1), wrapi(j0 + dj, n2))];
  };
  auto link2 = [&](int di, int dj) {
    return op.u2()[op.index(wrapi(i0 + di, n1), wrapi(j0 + dj, n2))];
  };
  // g(x + mu) = g(x) T(x) conj(U(x)) makes g^{-1} U g(x+mu) equal the radial link T.
  gat(0, 0) = 1.0;
  for (int di = 1; di <= hw1; ++di) {
    gat(di, 0) = gat(di - 1, 0) * radial_link(di - 1, 0, e1) * std::conj(link1(di - 1, 0));
    gat(-di, 0) = gat(-di + 1, 0) * std::conj(radial_link(-di, 0, e1)) * link1(-di, 0);
  }
  for (int di = -hw1; di <= hw1; ++di)
    for (int dj = 1; dj <= hw2; ++dj) {
      gat(di, dj) = gat(di, dj - 1) * radial_link(di, dj - 1, e2) * std::conj(link2(di, dj - 1));
      gat(di, -dj) = gat(di, -dj + 1) * std::conj(radial_link(di, -dj, e2)) * link2(di, -dj);
    }

  // phi = g * chi(Z) * u0(sqrt(p) Z), evaluated in log space per monomial.
  const double a = basis.a[0];
  const double sp = std::sqrt(static_cast<double>(p));
  std::vector<cplx> phi(op.dimension(), 0.0);
  for (int dj = -hw2; dj <= hw2; ++dj)
    for (int di = -hw1; di <= hw1; ++di) {
      const Eigen::Vector2d z = rel(di, dj);
      const double chi = cutoff(z.norm(), radius);
      if (chi == 0.0) continue;
      const cplx w = sp * cplx(z.x(), z.y());
      const double r2 = std::norm(w);
      cplx u = 0.0;
      for (size_t s = 0; s < basis.dimension(); ++s) {
        const int alpha = basis.states[s][0];
        const double logmag = (alpha > 0 ? alpha * 0.5 * std::log(r2) : 0.0) - 0.25 * a * r2 -
                              0.5 * basis.log_norms[s];
        if (alpha > 0 && r2 == 0.0) continue;
        u += coeffs[static_cast<Eigen::Index>(s)] * std::polar(std::exp(logmag), alpha * std::arg(w));
      }
      phi[op.index(wrapi(i0 + di, n1), wrapi(j0 + dj, n2))] = gat(di, dj) * chi * u;
    }

  const std::vector<cplx> hphi = matvec(op, phi);
  double nn = 0.0, num = 0.0;
  for (size_t x = 0; x < phi.size(); ++x) {
    nn += std::norm(phi[x]);
    num += std::real(std::conj(phi[x]) * hphi[x]);
  }
  if (nn == 0.0) throw std::runtime_error("quasimode vanishes on the grid");
  res.rayleigh_quotient = num / nn;
  double rr = 0.0;
  for (size_t x = 0; x < phi.size(); ++x) rr += std::norm(hphi[x] - res.rayleigh_quotient * phi[x]);
  res.residual_norm = std::sqrt(rr / nn);
  return res;
}

}  // namespace magwell
