#include <doctest.h>

#include <cmath>

#include "magwell/eigensolver.hpp"
#include "magwell/lattice.hpp"

using namespace magwell;

namespace {

ApplyFn diagonal(int n) {
  return [n](std::span<const cplx> v, std::span<cplx> w) {
    for (int i = 0; i < n; ++i) w[i] = static_cast<double>(i + 1) * v[i];
  };
}

double gram_defect(const Eigen::MatrixXcd& x) {
  const auto k = x.cols();
  return (x.adjoint() * x - Eigen::MatrixXcd::Identity(k, k)).cwiseAbs().maxCoeff();
}

LatticeOperator free_laplacian(int n) {
  const std::vector<cplx> ones(static_cast<size_t>(n) * n, 1.0);
  return LatticeOperator(build_field({1.0, 1.0}, 1, {}), 1, n, n, ones, ones);
}

}  // namespace

TEST_CASE("diagonal operator, iterative and dense paths") {
  for (size_t threshold : {size_t{0}, size_t{512}}) {
    EigOptions o;
    o.k = 3;
    o.dense_threshold = threshold;
    const EigResult e = lowest_eigenpairs(diagonal(100), 100, o);
    REQUIRE(e.converged);
    for (int j = 0; j < 3; ++j) {
      CHECK(e.eigenvalues[j] == doctest::Approx(j + 1.0).epsilon(1e-10));
      CHECK(e.residual_norms[j] <= o.tol);
    }
    CHECK(gram_defect(e.eigenvectors) < 1e-10);
  }
}

TEST_CASE("free lattice Laplacian kernel and degenerate first shell") {
  const int n = 64;
  const LatticeOperator op = free_laplacian(n);
  const ApplyFn apply = [&](std::span<const cplx> v, std::span<cplx> w) { matvec(op, v, w); };
  const double l1 = 4.0 * n * n * std::pow(std::sin(kPi / n), 2);

  const EigResult one = lowest_eigenpairs(apply, op.dimension(), 1, 1e-8, 5000, 1);
  REQUIRE(one.converged);
  CHECK(std::abs(one.eigenvalues[0]) < 1e-9);

  const EigResult four = lowest_eigenpairs(apply, op.dimension(), 4, 1e-8, 5000, 2);
  REQUIRE(four.converged);
  CHECK(std::abs(four.eigenvalues[0]) < 1e-9);
  for (int j = 1; j < 4; ++j) CHECK(four.eigenvalues[j] == doctest::Approx(l1).epsilon(1e-10));
  for (double r : four.residual_norms) CHECK(r <= 1e-8);
  CHECK(gram_defect(four.eigenvectors) < 1e-10);

  // Enlarging the trial space never raises computed values.
  const EigResult six = lowest_eigenpairs(apply, op.dimension(), 6, 1e-8, 5000, 2);
  for (int j = 0; j < 4; ++j) CHECK(six.eigenvalues[j] <= four.eigenvalues[j] + 1e-8);
}

TEST_CASE("solves are deterministic for a fixed seed") {
  const LatticeOperator op = free_laplacian(32);
  const ApplyFn apply = [&](std::span<const cplx> v, std::span<cplx> w) { matvec(op, v, w); };
  EigOptions o;
  o.k = 5;
  o.dense_threshold = 0;
  o.seed = 77;
  const EigResult a = lowest_eigenpairs(apply, op.dimension(), o);
  const EigResult b = lowest_eigenpairs(apply, op.dimension(), o);
  for (int j = 0; j < 5; ++j) CHECK(std::abs(a.eigenvalues[j] - b.eigenvalues[j]) <= 1e-12);
}

TEST_CASE("dense helpers") {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(3, 3);
  m(0, 0) = 3.0;
  m(1, 1) = 1.0;
  m(2, 2) = 2.0;
  m(0, 1) = m(1, 0) = 0.0;
  const EigResult e = dense_eigenpairs(m, 2);
  CHECK(e.eigenvalues[0] == doctest::Approx(1.0));
  CHECK(e.eigenvalues[1] == doctest::Approx(2.0));
  CHECK((dense_matrix(diagonal(4), 4).diagonal() - Eigen::Vector4cd(1, 2, 3, 4)).norm() == 0.0);
  CHECK_THROWS(dense_eigenpairs(m, 0));
}

TEST_CASE("cluster detection") {
  const ClusterPartition c = cluster_detect({0.1, 0.2, 50.0, 50.1});
  REQUIRE(c.count() == 2);
  CHECK(c.ranges[0] == std::pair<int, int>{0, 2});
  CHECK(c.ranges[1] == std::pair<int, int>{2, 4});

  const ClusterPartition u = cluster_detect({1.0, 2.0, 3.0, 4.0, 5.0});
  CHECK(u.count() == 1);
  CHECK_THROWS(cluster_detect({2.0, 1.0}));
}
