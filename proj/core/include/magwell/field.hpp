#pragma once

#include <array>
#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace magwell {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Flat torus [0, l1) x [0, l2).
struct TorusSpec {
  double l1 = 1.0;
  double l2 = 1.0;

  double area() const { return l1 * l2; }
};

/// One Fourier term c * exp(2 pi i (k1 x / l1 + k2 y / l2)).
struct FourierMode {
  int k1 = 0;
  int k2 = 0;
  cplx amplitude{0.0, 0.0};
};

/// Rotation by +90 degrees, [[0, -1], [1, 0]].
Eigen::Matrix2d rot90();

/// Flux-quantized magnetic field B = B0 + sum of modes on a flat torus.
/// Immutable once built; use build_field() to construct.
class FieldSpec {
 public:
  const TorusSpec& torus() const { return torus_; }
  int degree() const { return degree_; }
  const std::vector<FourierMode>& modes() const { return modes_; }
  double b0() const { return b0_; }

  double b(const Eigen::Vector2d& x) const;
  Eigen::Vector2d grad_b(const Eigen::Vector2d& x) const;
  Eigen::Matrix2d hess_b(const Eigen::Vector2d& x) const;

  /// Exact integral of B over the rectangle [x0, x0+w] x [y0, y0+h].
  double cell_integral(double x0, double y0, double w, double h) const;

  double omega(const Eigen::Vector2d& x) const { return b(x) / kTwoPi; }
  /// J0 = (B / 2 pi) rot90.
  Eigen::Matrix2d j0(const Eigen::Vector2d& x) const;
  /// Almost complex structure; rot90 on the flat torus.
  Eigen::Matrix2d almost_complex() const { return rot90(); }
  /// Curly J = -2 pi i J0 = -i B rot90.
  Eigen::Matrix2cd jcal(const Eigen::Vector2d& x) const;
  /// Curvature R^L(e1, e2) = -i B.
  cplx curvature(const Eigen::Vector2d& x) const { return {0.0, -b(x)}; }

  /// Extremes of B over the 256x256 validation grid.
  double b_min() const { return b_min_; }
  double b_max() const { return b_max_; }

  /// Canonical text form, used for hashing reports.
  std::string canonical() const;

 private:
  friend FieldSpec build_field(const TorusSpec&, int, std::vector<FourierMode>);

  TorusSpec torus_;
  int degree_ = 1;
  std::vector<FourierMode> modes_;
  double b0_ = 0.0;
  double b_min_ = 0.0;
  double b_max_ = 0.0;
};

/// Builds and validates a field. `modes` must be closed under k -> -k with
/// conjugate amplitudes. Throws std::invalid_argument("field not real") or
/// ("degenerate field") when B <= 0 somewhere on a 256x256 grid.
FieldSpec build_field(const TorusSpec& torus, int degree, std::vector<FourierMode> modes);

/// Completes a list of modes stored once per conjugate pair.
std::vector<FourierMode> conjugate_closure(const std::vector<FourierMode>& half);

/// tau = pi tr((-J0^2)^{1/2}), evaluated from J0 directly.
double intensity_tau(const FieldSpec& field, const Eigen::Vector2d& x);

/// Integral of B over the torus, summed from exact cell integrals.
double total_flux(const FieldSpec& field);

/// Wraps a point into the fundamental domain.
Eigen::Vector2d wrap(const TorusSpec& torus, const Eigen::Vector2d& x);

/// Minimum-image displacement x - y.
Eigen::Vector2d displacement(const TorusSpec& torus, const Eigen::Vector2d& x,
                             const Eigen::Vector2d& y);

struct WellData {
  Eigen::Vector2d x0 = Eigen::Vector2d::Zero();
  double tau0 = 0.0;
  Eigen::Matrix2d hess = Eigen::Matrix2d::Zero();
  Eigen::Matrix2d q = Eigen::Matrix2d::Zero();  ///< hess / 2
  std::vector<double> a;                        ///< curly-J eigenvalues; {tau0} in 2D
  double gradient_norm = 0.0;
};

/// Global minima of tau, refined by Newton. Sorted lexicographically by x0.
std::vector<WellData> find_wells(const FieldSpec& field, int scan_n = 128,
                                 double newton_tol = 1e-12);

/// Derivatives of curly J at a point: d1[k] = d_k J, d2[k][l] = d_k d_l J.
struct JcalJet {
  std::array<Eigen::Matrix2cd, 2> d1;
  std::array<std::array<Eigen::Matrix2cd, 2>, 2> d2;
};

JcalJet jcal_jet(const FieldSpec& field, const Eigen::Vector2d& x);

}  // namespace magwell
