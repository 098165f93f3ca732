#include <doctest.h>

#include <cmath>
#include <random>

#include "magwell/fock.hpp"

using namespace magwell;

TEST_CASE("Bergman kernel values") {
  const Eigen::Vector2d zero = Eigen::Vector2d::Zero();
  CHECK(std::abs(bergman_kernel({2.0}, zero, zero) - 1.0 / kPi) < 1e-15);
  CHECK(std::abs(bergman_kernel({2.0}, Eigen::Vector2d(1.0, 0.0), zero) - std::exp(-0.5) / kPi) < 1e-15);
  const Eigen::Vector2d z(0.3, -0.2), w(-0.5, 0.4);
  CHECK(std::abs(bergman_kernel({1.7}, z, w) - std::conj(bergman_kernel({1.7}, w, z))) < 1e-15);
}

TEST_CASE("LLL basis dimensions") {
  CHECK(lll_basis({1.0}, 2).dimension() == 3);
  CHECK(lll_basis({1.0, 2.0}, 2).dimension() == 6);
  CHECK_THROWS(lll_basis({-1.0}, 2));
}

TEST_CASE("Toeplitz compression") {
  const FockBasis b = lll_basis({2.5}, 10);
  const auto one = toeplitz_matrix(b, ComplexPolynomial::constant(1, 1.0));
  CHECK((one - Eigen::MatrixXcd::Identity(11, 11)).cwiseAbs().maxCoeff() < 1e-14);

  Eigen::Matrix2d q;
  q << 1.3, 0.4, 0.4, 0.7;
  ComplexPolynomial s = ComplexPolynomial::quadratic_form(q);
  const auto t = toeplitz_matrix(b, s);
  CHECK((t - t.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK_THROWS_WITH(toeplitz_matrix(b, ComplexPolynomial::z(1, 0)), "symbol not real");
}

TEST_CASE("model operator at cutoff zero") {
  WellData w;
  w.tau0 = 2.0;
  w.a = {2.0};
  w.hess = 2.0 * Eigen::Matrix2d::Identity();
  w.q = Eigen::Matrix2d::Identity();
  const ModelOperator op = model_operator(w, 0.0, 0);
  REQUIRE(op.matrix.rows() == 1);
  CHECK(std::abs(op.matrix(0, 0) - 1.0) < 1e-14);

  WellData flat = w;
  flat.hess.setZero();
  flat.q.setZero();
  CHECK_THROWS_WITH(model_operator(flat, 0.0, 4), "degenerate well");

  const ModelOperator shift = model_operator(Eigen::MatrixXd::Zero(2, 2), {2.0}, 3.5, 6);
  CHECK((shift.matrix - 3.5 * Eigen::MatrixXcd::Identity(7, 7)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("model spectra against closed forms") {
  const ModelSpectrum iso = model_spectrum(model_operator(Eigen::MatrixXd::Identity(2, 2), {2.0}, 0.0, 64), 6);
  for (int j = 0; j < 6; ++j) CHECK(iso.mu[j] == doctest::Approx(j + 1.0).epsilon(1e-12));
  CHECK(iso.convergence < 1e-12);

  const ModelSpectrum zero = model_spectrum(model_operator(Eigen::MatrixXd::Zero(2, 2), {2.0}, 0.0, 64), 4);
  for (double m : zero.mu) CHECK(std::abs(m) < 1e-14);

  Eigen::MatrixXd q = Eigen::Vector2d(1.0, 4.0).asDiagonal();
  const ModelSpectrum an = model_spectrum(model_operator(q, {1.0}, 0.0, 80), 4, {32, 48, 64, 80});
  for (int j = 0; j < 4; ++j) CHECK(std::abs(an.mu[j] - (4.0 * j + 4.5)) < 1e-8);

  CHECK(closed_form_n1(Eigen::Matrix2d::Identity(), 2.0, 0.0, 3) == doctest::Approx(4.0));
  CHECK(closed_form_n1(Eigen::Vector2d(1.0, 4.0).asDiagonal(), 1.0, 0.0, 2) == doctest::Approx(12.5));
  CHECK(closed_form_n1(Eigen::Matrix2d::Identity(), 2.0, 7.0, 0) == doctest::Approx(8.0));
}

TEST_CASE("model spectra are ordered and stable under refinement") {
  Eigen::MatrixXd q(2, 2);
  q << 2.0, 0.5, 0.5, 1.0;
  const ModelOperator op = model_operator(q, {1.5}, 0.0, 64);
  const ModelSpectrum s = model_spectrum(op, 8);
  for (size_t j = 1; j < s.mu.size(); ++j) CHECK(s.mu[j] >= s.mu[j - 1]);
  const ModelSpectrum coarse = model_spectrum(op, 8, {16, 24}, 1.0);
  for (size_t j = 0; j < s.mu.size(); ++j) CHECK(s.mu[j] <= coarse.mu[j] + 1e-9);
}

TEST_CASE("Williamson spectra") {
  const auto iso = williamson_quadratic_spectrum(Eigen::MatrixXd::Identity(2, 2), 3);
  CHECK(iso[0] == doctest::Approx(2.0));
  CHECK(iso[1] == doctest::Approx(4.0));
  CHECK(iso[2] == doctest::Approx(6.0));
  const auto an = williamson_quadratic_spectrum(Eigen::Vector2d(1.0, 4.0).asDiagonal(), 2);
  CHECK(an[0] == doctest::Approx(4.5));
  CHECK(an[1] == doctest::Approx(8.5));
  CHECK(symplectic_eigenvalues(Eigen::Vector2d(1.0, 4.0).asDiagonal())[0] == doctest::Approx(2.0));
}

TEST_CASE("three model oracles agree on random quadratic wells") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.5, 3.0), ang(0.0, kPi);
  for (int t = 0; t < 5; ++t) {
    const double th = ang(rng);
    Eigen::Matrix2d r;
    r << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
    const Eigen::Matrix2d q = r * Eigen::Vector2d(u(rng), u(rng)).asDiagonal() * r.transpose();
    const double tau0 = 1.0 + u(rng);
    const ModelSpectrum f = model_spectrum(model_operator(q, {tau0}, 0.0, 80), 8, {32, 48, 64, 80});
    const auto w = williamson_quadratic_spectrum(weyl_form_from_well(q, {tau0}), 8);
    for (int j = 0; j < 8; ++j) {
      CHECK(std::abs(f.mu[j] - closed_form_n1(q, tau0, 0.0, j)) < 1e-8);
      CHECK(std::abs(f.mu[j] - w[j]) < 1e-8);
    }
  }
}

TEST_CASE("ensemble spectra merge components") {
  ModelEnsemble single{{model_operator(Eigen::MatrixXd::Identity(2, 2), {2.0}, 0.0, 64)}};
  const auto one = ensemble_spectrum(single, 3);
  CHECK(one[2].mu == doctest::Approx(3.0));

  ModelEnsemble twin{{single.components[0], single.components[0]}};
  const auto two = ensemble_spectrum(twin, 4);
  CHECK(two[0].mu == doctest::Approx(1.0));
  CHECK(two[1].mu == doctest::Approx(1.0));
  CHECK(two[0].well == 0);
  CHECK(two[1].well == 1);
  CHECK(two[3].mu == doctest::Approx(2.0));

  // spectra {1, 3, 5, ...} and {2, 4, 6, ...}
  ModelEnsemble odd_even{{model_operator(Eigen::MatrixXd::Identity(2, 2), {1.0}, -1.0, 64),
                          model_operator(Eigen::MatrixXd::Identity(2, 2), {1.0}, 0.0, 64)}};
  const auto merged = ensemble_spectrum(odd_even, 4);
  for (int j = 0; j < 4; ++j) CHECK(merged[j].mu == doctest::Approx(j + 1.0));
}
