#pragma once

#include <map>
#include <vector>

#include <Eigen/Dense>

#include "magwell/field.hpp"

namespace magwell {

using MultiIndex = std::vector<int>;

/// Polynomial in (z_1..z_n, zbar_1..zbar_n). A term is keyed by the
/// concatenated exponent vector (z powers, then zbar powers).
class ComplexPolynomial {
 public:
  explicit ComplexPolynomial(int n = 1) : n_(n) {}

  static ComplexPolynomial constant(int n, cplx c);
  static ComplexPolynomial z(int n, int j);
  static ComplexPolynomial zbar(int n, int j);
  /// Real coordinate Z_k with z_j = Z_{2j} + i Z_{2j+1} (zero-based).
  static ComplexPolynomial real_coordinate(int n, int k);
  /// Z^T q Z for a real symmetric 2n x 2n matrix q.
  static ComplexPolynomial quadratic_form(const Eigen::MatrixXd& q);

  int n() const { return n_; }
  const std::map<MultiIndex, cplx>& terms() const { return terms_; }
  void add_term(const MultiIndex& zpow, const MultiIndex& zbarpow, cplx c);
  int degree() const;

  ComplexPolynomial conj() const;
  /// True when the polynomial equals its complex conjugate to tol.
  bool is_real(double tol = 1e-12) const;
  cplx evaluate(const std::vector<cplx>& z) const;

  ComplexPolynomial& operator+=(const ComplexPolynomial& o);
  ComplexPolynomial& operator*=(cplx s);
  friend ComplexPolynomial operator+(ComplexPolynomial a, const ComplexPolynomial& b) {
    return a += b;
  }
  friend ComplexPolynomial operator*(ComplexPolynomial a, cplx s) { return a *= s; }
  friend ComplexPolynomial operator*(const ComplexPolynomial& a, const ComplexPolynomial& b);

 private:
  void prune();

  int n_;
  std::map<MultiIndex, cplx> terms_;
};

/// Normalized monomials z^alpha exp(-sum a_j |z_j|^2 / 4), |alpha| <= cutoff.
struct FockBasis {
  int n = 1;
  std::vector<double> a;
  int cutoff = 0;
  std::vector<MultiIndex> states;
  std::vector<double> log_norms;  ///< log ||z^alpha G||^2
  std::map<MultiIndex, int> index;

  size_t dimension() const { return states.size(); }
};

/// log of prod_j pi (2/a_j)^{m_j+1} m_j!, the squared norm of z^m G.
double log_gaussian_moment(const std::vector<double>& a, const MultiIndex& m);

cplx bergman_kernel(const std::vector<double>& a, const Eigen::VectorXd& z,
                    const Eigen::VectorXd& zp);

FockBasis lll_basis(const std::vector<double>& a, int cutoff);

/// Compression of a real polynomial symbol to the truncated LLL basis, exact
/// from Gaussian moments.
Eigen::MatrixXcd toeplitz_matrix(const FockBasis& basis, const ComplexPolynomial& symbol);

struct ModelOperator {
  Eigen::MatrixXd q;  ///< 2n x 2n quadratic form in real coordinates
  std::vector<double> a;
  double j12 = 0.0;
  ComplexPolynomial symbol;
  FockBasis basis;
  Eigen::MatrixXcd matrix;
};

ModelOperator model_operator(const WellData& well, double j12, int cutoff);
ModelOperator model_operator(const Eigen::MatrixXd& q, const std::vector<double>& a, double j12,
                             int cutoff);

inline const std::vector<int> kDefaultCutoffs{16, 24, 32, 48, 64};

struct ModelSpectrum {
  std::vector<double> mu;
  double convergence = 0.0;
  int cutoff = 0;
  FockBasis basis;           ///< basis at the final cutoff
  Eigen::MatrixXcd vectors;  ///< columns: eigenvectors in `basis`
};

/// Lowest `count` eigenvalues at the largest cutoff. Throws
/// std::runtime_error("increase cutoff") when the last refinement moved any
/// eigenvalue by more than tol.
ModelSpectrum model_spectrum(const ModelOperator& op, int count,
                             const std::vector<int>& cutoffs = kDefaultCutoffs,
                             double tol = 1e-9);

/// (2 sqrt(det Q) / tau0) j + (tr Q^{1/2})^2 / (2 tau0) + j12.
double closed_form_n1(const Eigen::Matrix2d& q, double tau0, double j12, int j);

/// Moduli of the eigenvalues of J_std M, one per conjugate pair, ascending.
Eigen::VectorXd symplectic_eigenvalues(const Eigen::MatrixXd& weyl_form);

std::vector<double> williamson_quadratic_spectrum(const Eigen::MatrixXd& weyl_form, int count);

/// Weyl-side form of a well's quadratic symbol in (x, xi) ordering, from the
/// Bargmann scaling Z_{2j} = x_j / sqrt(a_j), Z_{2j+1} = -xi_j / sqrt(a_j).
Eigen::MatrixXd weyl_form_from_well(const Eigen::MatrixXd& q, const std::vector<double>& a);

struct ModelEnsemble {
  std::vector<ModelOperator> components;
};

struct EnsembleLevel {
  double mu = 0.0;
  int well = 0;
};

/// Sorted union of component spectra, ties broken by well index.
std::vector<EnsembleLevel> ensemble_spectrum(const ModelEnsemble& ensemble, int count,
                                             const std::vector<int>& cutoffs = kDefaultCutoffs,
                                             double tol = 1e-9);

}  // namespace magwell
