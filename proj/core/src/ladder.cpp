#include "magwell/ladder.hpp"

#include <cmath>
#include <stdexcept>

namespace magwell {

namespace {

MultiIndex concat(const MultiIndex& alpha, const MultiIndex& beta) {
  MultiIndex k(alpha);
  k.insert(k.end(), beta.begin(), beta.end());
  return k;
}

void split(const MultiIndex& key, int n, MultiIndex& alpha, MultiIndex& beta) {
  alpha.assign(key.begin(), key.begin() + n);
  beta.assign(key.begin() + n, key.end());
}

}  // namespace

LadderElement LadderElement::state(const std::vector<double>& a, const MultiIndex& alpha,
                                   const MultiIndex& beta, cplx c) {
  LadderElement e(a);
  e.add(alpha, beta, c);
  return e;
}

void LadderElement::add(const MultiIndex& alpha, const MultiIndex& beta, cplx c) {
  if (c == cplx{}) return;
  coeffs_[concat(alpha, beta)] += c;
}

LadderElement& LadderElement::operator+=(const LadderElement& o) {
  if (a_.empty()) a_ = o.a_;
  for (const auto& [k, c] : o.coeffs_) coeffs_[k] += c;
  prune();
  return *this;
}

LadderElement& LadderElement::operator*=(cplx s) {
  for (auto& [k, c] : coeffs_) c *= s;
  prune();
  return *this;
}

void LadderElement::prune() {
  for (auto it = coeffs_.begin(); it != coeffs_.end();)
    it = it->second == cplx{} ? coeffs_.erase(it) : std::next(it);
}

LadderElement LadderElement::kernel_part() const {
  LadderElement out(a_);
  MultiIndex alpha, beta;
  for (const auto& [k, c] : coeffs_) {
    split(k, n(), alpha, beta);
    bool zero = true;
    for (int b : beta) zero = zero && b == 0;
    if (zero) out.coeffs_[k] = c;
  }
  return out;
}

double LadderElement::max_abs() const {
  double m = 0.0;
  MultiIndex alpha, beta;
  for (const auto& [k, c] : coeffs_) {
    split(k, n(), alpha, beta);
    m = std::max(m, std::abs(c) * std::exp(0.5 * ladder_log_norm(a_, alpha, beta)));
  }
  return m;
}

double ladder_log_norm(const std::vector<double>& a, const MultiIndex& alpha,
                       const MultiIndex& beta) {
  double s = log_gaussian_moment(a, alpha);
  for (size_t j = 0; j < a.size(); ++j)
    s += beta[j] * std::log(2.0 * a[j]) + std::lgamma(beta[j] + 1.0);
  return s;
}

LadderElement apply_b(const LadderElement& e, int j) {
  LadderElement out(e.a());
  MultiIndex alpha, beta;
  for (const auto& [k, c] : e.coeffs()) {
    split(k, e.n(), alpha, beta);
    ++beta[j];
    out.add(alpha, beta, c);
  }
  return out;
}

LadderElement apply_b_plus(const LadderElement& e, int j) {
  // b_j^+ b^beta f_alpha = 2 a_j beta_j b^{beta - e_j} f_alpha, since b^+ f_alpha = 0.
  LadderElement out(e.a());
  MultiIndex alpha, beta;
  for (const auto& [k, c] : e.coeffs()) {
    split(k, e.n(), alpha, beta);
    if (beta[j] == 0) continue;
    const double f = 2.0 * e.a()[j] * beta[j];
    --beta[j];
    out.add(alpha, beta, f * c);
  }
  return out;
}

LadderElement apply_L(const LadderElement& e) {
  LadderElement out(e.a());
  MultiIndex alpha, beta;
  for (const auto& [k, c] : e.coeffs()) {
    split(k, e.n(), alpha, beta);
    double ev = 0.0;
    for (int j = 0; j < e.n(); ++j) ev += 2.0 * e.a()[j] * beta[j];
    out.add(alpha, beta, ev * c);
  }
  return out;
}

LadderElement apply_L_inverse(const LadderElement& e, double kernel_tol) {
  const double scale = std::max(1.0, e.max_abs());
  if (e.kernel_part().max_abs() > kernel_tol * scale)
    throw std::domain_error("ℒ⁻¹ undefined on ker ℒ");
  LadderElement out(e.a());
  MultiIndex alpha, beta;
  for (const auto& [k, c] : e.coeffs()) {
    split(k, e.n(), alpha, beta);
    double ev = 0.0;
    for (int j = 0; j < e.n(); ++j) ev += 2.0 * e.a()[j] * beta[j];
    if (ev == 0.0) continue;
    out.add(alpha, beta, c / ev);
  }
  return out;
}

LadderElement multiply_z(const LadderElement& e, int j) {
  // [b_j, z_j] = -2, so z b^beta f_alpha = b^beta f_{alpha+e_j} + 2 beta_j b^{beta-e_j} f_alpha.
  LadderElement out(e.a());
  MultiIndex alpha, beta;
  for (const auto& [k, c] : e.coeffs()) {
    split(k, e.n(), alpha, beta);
    if (beta[j] > 0) {
      MultiIndex lower(beta);
      --lower[j];
      out.add(alpha, lower, 2.0 * beta[j] * c);
    }
    ++alpha[j];
    out.add(alpha, beta, c);
  }
  return out;
}

LadderElement multiply_zbar(const LadderElement& e, int j) {
  // zbar commutes with b; zbar f_alpha = (b f_alpha + 2 alpha_j f_{alpha-e_j}) / a_j.
  LadderElement out(e.a());
  const double inv = 1.0 / e.a()[j];
  MultiIndex alpha, beta;
  for (const auto& [k, c] : e.coeffs()) {
    split(k, e.n(), alpha, beta);
    if (alpha[j] > 0) {
      MultiIndex lower(alpha);
      --lower[j];
      out.add(lower, beta, 2.0 * alpha[j] * inv * c);
    }
    ++beta[j];
    out.add(alpha, beta, inv * c);
  }
  return out;
}

LadderElement multiply(const LadderElement& e, const ComplexPolynomial& p) {
  const int n = e.n();
  LadderElement out(e.a());
  for (const auto& [key, c] : p.terms()) {
    LadderElement t = e;
    for (int j = 0; j < n; ++j) {
      for (int r = 0; r < key[j]; ++r) t = multiply_z(t, j);
      for (int r = 0; r < key[n + j]; ++r) t = multiply_zbar(t, j);
    }
    out += t * c;
  }
  return out;
}

cplx inner_product(const LadderElement& x, const LadderElement& y) {
  cplx s = 0.0;
  MultiIndex alpha, beta;
  for (const auto& [k, c] : x.coeffs()) {
    const auto it = y.coeffs().find(k);
    if (it == y.coeffs().end()) continue;
    split(k, x.n(), alpha, beta);
    s += std::conj(c) * it->second * std::exp(ladder_log_norm(x.a(), alpha, beta));
  }
  return s;
}

JcalJet rotate_jet(const JcalJet& jet, double theta) {
  Eigen::Matrix2d r;
  r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  const Eigen::Matrix2cd rc = r.cast<cplx>();
  JcalJet out;
  for (int k = 0; k < 2; ++k) {
    out.d1[k].setZero();
    for (int m = 0; m < 2; ++m) out.d1[k] += r(m, k) * (rc.transpose() * jet.d1[m] * rc);
    for (int l = 0; l < 2; ++l) {
      out.d2[k][l].setZero();
      for (int m = 0; m < 2; ++m)
        for (int q = 0; q < 2; ++q)
          out.d2[k][l] += r(m, k) * r(q, l) * (rc.transpose() * jet.d2[m][q] * rc);
    }
  }
  return out;
}

J12Result compute_J12(const WellData& well, const JcalJet& jet, int cutoff) {
  if (well.a.size() != 1) throw std::invalid_argument("compute_J12 supports n = 1");
  const std::vector<double>& a = well.a;
  const int n = 1;

  // Tangent vectors d/dz = (e1 - i e2)/2 and d/dzbar = (e1 + i e2)/2; the
  // pairing <u, v> = sum_c u_c v_c is complex bilinear.
  const Eigen::Vector2cd dz(0.5, cplx(0.0, -0.5));
  const Eigen::Vector2cd dzb(0.5, cplx(0.0, 0.5));
  const Eigen::Matrix2cd jmat = rot90().cast<cplx>();
  const std::array<ComplexPolynomial, 2> coord{ComplexPolynomial::real_coordinate(n, 0),
                                               ComplexPolynomial::real_coordinate(n, 1)};

  ComplexPolynomial hess_term(n), trace_term(n);
  for (int k = 0; k < 2; ++k)
    for (int l = 0; l < 2; ++l) {
      const ComplexPolynomial zz = coord[k] * coord[l];
      const cplx pair = dzb.transpose() * jet.d2[k][l] * dz;
      const cplx tr = cplx(0.0, 0.25) * (jmat * jet.d2[k][l]).trace();
      hess_term += zz * pair;
      trace_term += zz * tr;
    }

  // v = (grad_R curly-J) R, a vector of quadratic polynomials.
  std::array<ComplexPolynomial, 2> v{ComplexPolynomial(n), ComplexPolynomial(n)};
  for (int c = 0; c < 2; ++c)
    for (int k = 0; k < 2; ++k)
      for (int d = 0; d < 2; ++d)
        if (jet.d1[k](c, d) != cplx{}) v[c] += coord[k] * coord[d] * jet.d1[k](c, d);

  ComplexPolynomial grad_sq(n), u(n), w(n);
  for (int c = 0; c < 2; ++c) {
    grad_sq += v[c] * v[c].conj() * cplx(1.0 / 9.0, 0.0);
    u += v[c] * dz[c];
    w += v[c] * dzb[c];
  }

  const FockBasis basis = lll_basis(a, cutoff);
  const auto dim = static_cast<Eigen::Index>(basis.dimension());
  std::vector<LadderElement> states;
  for (const auto& alpha : basis.states) {
    const double inv = std::exp(-0.5 * log_gaussian_moment(a, alpha));
    states.push_back(LadderElement::state(a, alpha, MultiIndex(n, 0), inv));
  }

  std::array<Eigen::MatrixXcd, 4> parts;
  for (auto& m : parts) m = Eigen::MatrixXcd::Zero(dim, dim);
  for (Eigen::Index col = 0; col < dim; ++col) {
    const LadderElement& f = states[col];
    std::array<LadderElement, 4> images{multiply(f, hess_term), multiply(f, trace_term),
                                        multiply(f, grad_sq), LadderElement(a)};
    LadderElement res(a);
    for (int j = 0; j < n; ++j) {
      const LadderElement inner = apply_b(multiply(f, w), j);
      res += multiply(apply_b_plus(apply_L_inverse(inner), j), u);
    }
    images[3] = res * cplx(4.0 / 9.0, 0.0);
    for (int t = 0; t < 4; ++t)
      for (Eigen::Index row = 0; row < dim; ++row)
        parts[t](row, col) = inner_product(states[row], images[t]);
  }

  J12Result out;
  out.matrix = parts[0] + parts[1] + parts[2] + parts[3];
  for (int t = 0; t < 4; ++t) out.terms[t] = parts[t](0, 0);
  out.value = out.matrix(0, 0).real();
  const Eigen::MatrixXcd dev =
      out.matrix - cplx(out.value, 0.0) * Eigen::MatrixXcd::Identity(dim, dim);
  out.scalarity_defect = dev.cwiseAbs().maxCoeff();
  if (out.scalarity_defect > 1e-8)
    throw std::runtime_error("F_{1,2} not scalar at requested cutoff");
  return out;
}

}  // namespace magwell
