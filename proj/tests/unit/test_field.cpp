#include <doctest.h>

#include <cmath>

#include "magwell/field.hpp"

using namespace magwell;

namespace {

FieldSpec two_mode() {
  return build_field({1.0, 1.0}, 1, conjugate_closure({{1, 0, {0.5, 0.0}}, {0, 1, {0.5, 0.0}}}));
}

}  // namespace

TEST_CASE("constant and two-mode fields evaluate to their Fourier sums") {
  const FieldSpec c = build_field({1.0, 1.0}, 1, {});
  CHECK(c.b({0.3, 0.7}) == doctest::Approx(kTwoPi).epsilon(1e-15));

  const FieldSpec f = two_mode();
  CHECK(f.b({0.5, 0.5}) == doctest::Approx(kTwoPi - 2.0).epsilon(1e-14));
  const Eigen::Vector2d x(0.13, 0.71);
  const double direct = kTwoPi + std::cos(kTwoPi * x[0]) + std::cos(kTwoPi * x[1]);
  CHECK(std::abs(f.b(x) - direct) < 1e-13);
}

TEST_CASE("unpaired amplitude is rejected") {
  CHECK_THROWS_WITH(build_field({1.0, 1.0}, 1, {{1, 0, {0.5, 0.0}}}), "field not real");
}

TEST_CASE("nonpositive field is rejected") {
  CHECK_THROWS_WITH(build_field({1.0, 1.0}, 1, conjugate_closure({{1, 0, {4.0, 0.0}}})), "degenerate field");
}

TEST_CASE("tau equals B pointwise") {
  const FieldSpec f = two_mode();
  double worst = 0.0;
  for (int i = 0; i < 64; ++i)
    for (int j = 0; j < 64; ++j) {
      const Eigen::Vector2d x(i / 64.0, j / 64.0);
      worst = std::max(worst, std::abs(intensity_tau(f, x) - f.b(x)));
    }
  CHECK(worst <= 1e-12);
  CHECK(intensity_tau(build_field({1.0, 1.0}, 1, {}), {0.2, 0.9}) == doctest::Approx(kTwoPi));
}

TEST_CASE("total flux is quantized") {
  CHECK(total_flux(build_field({1.0, 1.0}, 1, {})) == doctest::Approx(kTwoPi).epsilon(1e-13));
  CHECK(total_flux(build_field({2.0, 1.0}, 3, {})) == doctest::Approx(6.0 * kPi).epsilon(1e-13));
  const FieldSpec f = build_field({1.5, 0.8}, 2, conjugate_closure({{1, 2, {0.3, 0.2}}, {2, -1, {0.1, -0.4}}}));
  CHECK(total_flux(f) == doctest::Approx(4.0 * kPi).epsilon(1e-12));
}

TEST_CASE("two-mode field has one well at the centre") {
  const auto wells = find_wells(two_mode());
  REQUIRE(wells.size() == 1);
  const WellData& w = wells[0];
  CHECK((w.x0 - Eigen::Vector2d(0.5, 0.5)).norm() < 1e-10);
  CHECK(w.tau0 == doctest::Approx(kTwoPi - 2.0).epsilon(1e-13));
  CHECK((w.hess - kTwoPi * kTwoPi * Eigen::Matrix2d::Identity()).norm() < 1e-8);
  CHECK(w.gradient_norm <= 1e-12);
  REQUIRE(w.a.size() == 1);
  CHECK(std::abs(w.a[0] - w.tau0) <= 1e-12);
}

TEST_CASE("constant field has no nondegenerate well") {
  CHECK_THROWS_WITH(find_wells(build_field({1.0, 1.0}, 1, {})), "no nondegenerate well");
}

TEST_CASE("degree-two field with two equal wells") {
  const FieldSpec f = build_field({1.0, 1.0}, 2, conjugate_closure({{2, 0, {0.5, 0.0}}, {0, 1, {0.5, 0.0}}}));
  const auto wells = find_wells(f);
  REQUIRE(wells.size() == 2);
  CHECK((wells[0].x0 - Eigen::Vector2d(0.25, 0.5)).norm() < 1e-9);
  CHECK((wells[1].x0 - Eigen::Vector2d(0.75, 0.5)).norm() < 1e-9);
  CHECK(wells[0].tau0 == doctest::Approx(wells[1].tau0).epsilon(1e-12));
  for (const auto& w : wells) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(w.hess);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
  }
}

TEST_CASE("well positions do not depend on the scan resolution") {
  const FieldSpec f = build_field({1.0, 1.0}, 1, conjugate_closure({{1, 1, {0.3, 0.1}}, {0, 1, {0.2, -0.3}}}));
  const auto coarse = find_wells(f, 64);
  const auto fine = find_wells(f, 128);
  REQUIRE(coarse.size() == fine.size());
  for (size_t i = 0; i < coarse.size(); ++i) CHECK((coarse[i].x0 - fine[i].x0).norm() < 1e-9);
}

TEST_CASE("cell integrals add up and match the field derivative structure") {
  const FieldSpec f = two_mode();
  const double whole = f.cell_integral(0.1, 0.2, 0.4, 0.3);
  const double parts = f.cell_integral(0.1, 0.2, 0.2, 0.3) + f.cell_integral(0.3, 0.2, 0.2, 0.3);
  CHECK(std::abs(whole - parts) < 1e-14);
  const Eigen::Vector2d x(0.3, 0.4), h(1e-5, 0.0);
  const double fd = (f.b(x + h) - f.b(x - h)) / 2e-5;
  CHECK(std::abs(f.grad_b(x)[0] - fd) < 1e-7);
}

TEST_CASE("minimum-image displacement") {
  const TorusSpec t{1.0, 2.0};
  const Eigen::Vector2d d = displacement(t, {0.95, 0.1}, {0.05, 1.9});
  CHECK(d[0] == doctest::Approx(-0.1));
  CHECK(d[1] == doctest::Approx(0.2));
}
