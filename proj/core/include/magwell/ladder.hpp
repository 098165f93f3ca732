#pragma once

#include <array>
#include <map>
#include <vector>

#include <Eigen/Dense>

#include "magwell/field.hpp"
#include "magwell/fock.hpp"

namespace magwell {

/// Finite combination of states b^beta (z^alpha G), G = exp(-sum a_j |z_j|^2 / 4),
/// with b_j = -2 d/dz_j + a_j zbar_j / 2 and b_j^+ = 2 d/dzbar_j + a_j z_j / 2.
/// Keys are the concatenation (alpha, beta). States are not normalized.
class LadderElement {
 public:
  LadderElement() = default;
  explicit LadderElement(std::vector<double> a) : a_(std::move(a)) {}

  static LadderElement state(const std::vector<double>& a, const MultiIndex& alpha,
                             const MultiIndex& beta, cplx c = 1.0);

  int n() const { return static_cast<int>(a_.size()); }
  const std::vector<double>& a() const { return a_; }
  const std::map<MultiIndex, cplx>& coeffs() const { return coeffs_; }

  void add(const MultiIndex& alpha, const MultiIndex& beta, cplx c);
  LadderElement& operator+=(const LadderElement& o);
  LadderElement& operator*=(cplx s);
  friend LadderElement operator+(LadderElement x, const LadderElement& y) { return x += y; }
  friend LadderElement operator*(LadderElement x, cplx s) { return x *= s; }

  /// Part with beta = 0, i.e. the projection onto ker L.
  LadderElement kernel_part() const;
  /// Largest |coefficient| times state norm, a scale for tolerances.
  double max_abs() const;

 private:
  void prune();

  std::vector<double> a_;
  std::map<MultiIndex, cplx> coeffs_;
};

/// log ||b^beta z^alpha G||^2 = log( prod (2a_j)^beta_j beta_j! ) + log N_alpha.
double ladder_log_norm(const std::vector<double>& a, const MultiIndex& alpha,
                       const MultiIndex& beta);

LadderElement apply_b(const LadderElement& e, int j);
LadderElement apply_b_plus(const LadderElement& e, int j);
LadderElement apply_L(const LadderElement& e);
/// Throws std::domain_error when the kernel component exceeds kernel_tol
/// relative to the element scale.
LadderElement apply_L_inverse(const LadderElement& e, double kernel_tol = 1e-12);
LadderElement multiply_z(const LadderElement& e, int j);
LadderElement multiply_zbar(const LadderElement& e, int j);
LadderElement multiply(const LadderElement& e, const ComplexPolynomial& p);

/// L^2 inner product, antilinear in the first argument.
cplx inner_product(const LadderElement& x, const LadderElement& y);

/// Per-term breakdown of P F P on the truncated LLL basis (orthonormal).
struct J12Result {
  double value = 0.0;
  double scalarity_defect = 0.0;
  /// (0,0) entries of the four flat-torus terms: Hessian pairing, trace
  /// term, |grad|^2 term, resolvent term.
  std::array<cplx, 4> terms{};
  Eigen::MatrixXcd matrix;
};

/// J_{1,2} at a 2D well from curly-J derivative data, with the complex-bilinear
/// pairing of tangent vectors. Throws std::runtime_error when P F P is not a
/// multiple of the identity to 1e-8 on the truncated basis.
J12Result compute_J12(const WellData& well, const JcalJet& jet, int cutoff = 8);

/// Jet data expressed in a frame rotated by theta.
JcalJet rotate_jet(const JcalJet& jet, double theta);

}  // namespace magwell
