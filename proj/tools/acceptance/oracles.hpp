#pragma once

// Reference quantities computed independently of the library code paths
// they are used to check.

#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace magwell::oracle {

struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Hermite rule for weight exp(-x^2) by Golub-Welsch.
inline Rule gauss_hermite(int n) {
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) jac(k, k - 1) = jac(k - 1, k) = std::sqrt(0.5 * k);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);
  Rule r;
  const double mass = std::sqrt(3.14159265358979323846);
  for (int k = 0; k < n; ++k) {
    const double v = es.eigenvectors()(0, k);
    r.nodes.push_back(es.eigenvalues()[k]);
    r.weights.push_back(mass * v * v);
  }
  return r;
}

/// Spectrum of the periodic 1D second difference with spacing h, mode k of n.
inline double discrete_laplacian_mode(int k, int n, double h) {
  const double s = std::sin(3.14159265358979323846 * k / n);
  return 4.0 / (h * h) * s * s;
}

}  // namespace magwell::oracle
