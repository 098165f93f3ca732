#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace magwell {

using cplx = std::complex<double>;
using ApplyFn = std::function<void(std::span<const cplx>, std::span<cplx>)>;

struct EigResult {
  std::vector<double> eigenvalues;  ///< ascending
  Eigen::MatrixXcd eigenvectors;    ///< orthonormal columns
  std::vector<double> residual_norms;
  int iterations = 0;  ///< basis expansions
  long matvecs = 0;
  std::uint64_t seed = 0;
  bool converged = false;
  std::string status;  ///< "converged", "unconverged" or "dense"
};

struct EigOptions {
  int k = 1;
  double tol = 1e-8;      ///< absolute residual norm
  int max_iter = 5000;    ///< basis expansions
  std::uint64_t seed = 12345;
  size_t dense_threshold = 512;
  /// Upper bound on the spectrum. When zero, estimated from a short Lanczos run.
  double upper_bound = 0.0;
  int overshoot = 8;      ///< extra Ritz pairs tracked beyond k
  int max_basis = 0;      ///< zero: k + overshoot + max(24, (k + overshoot) / 4)
  int max_degree = 1200;  ///< cap on the Chebyshev filter degree
  /// Extra expansions from a fresh random vector once k pairs are locked,
  /// to expose missing copies of degenerate eigenvalues.
  int confirm_steps = 8;
};

/// Lowest k eigenpairs of a Hermitian operator. Block-size-1 Lanczos with full
/// reorthogonalization; each expansion applies a Chebyshev filter that damps
/// [cut, upper_bound], with the cut tracking Ritz value k + overshoot.
/// Converged pairs are locked. Dense solve when dim <= dense_threshold.
EigResult lowest_eigenpairs(const ApplyFn& apply, size_t dim, const EigOptions& opts);

EigResult lowest_eigenpairs(const ApplyFn& apply, size_t dim, int k, double tol, int max_iter,
                            std::uint64_t seed);

/// Dense Hermitian eigensolve of an explicit matrix, lowest k pairs.
EigResult dense_eigenpairs(const Eigen::MatrixXcd& m, int k);

/// Materializes an operator as a dense matrix (dim matvecs).
Eigen::MatrixXcd dense_matrix(const ApplyFn& apply, size_t dim);

struct ClusterPartition {
  std::vector<std::pair<int, int>> ranges;  ///< [begin, end) per cluster
  std::vector<double> gaps;                 ///< gap after each cluster but the last
  double threshold = 0.0;                   ///< gap size that triggered a split

  size_t count() const { return ranges.size(); }
  int size(size_t c) const { return ranges[c].second - ranges[c].first; }
};

/// Splits an ascending list at gaps larger than gap_factor times the spacing
/// scale max(median spacing, 1e-3 * range).
ClusterPartition cluster_detect(const std::vector<double>& eigs, double gap_factor = 10.0);

}  // namespace magwell
