#include <doctest.h>

#include <cmath>
#include <random>

#include "magwell/ladder.hpp"

using namespace magwell;

namespace {

LadderElement random_element(std::mt19937_64& rng, const std::vector<double>& a, int max_deg) {
  std::uniform_int_distribution<int> deg(0, max_deg);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  LadderElement f(a);
  for (int t = 0; t < 5; ++t) f.add({deg(rng)}, {deg(rng)}, cplx(u(rng), u(rng)));
  return f;
}

}  // namespace

TEST_CASE("b raises the ladder index of the ground state") {
  const LadderElement g = LadderElement::state({2.0}, {0}, {0});
  const LadderElement bg = apply_b(g, 0);
  REQUIRE(bg.coeffs().size() == 1);
  CHECK(bg.coeffs().begin()->first == MultiIndex{0, 1});
  CHECK(apply_b_plus(g, 0).coeffs().empty());
}

TEST_CASE("inverse of L") {
  const LadderElement e = LadderElement::state({2.0}, {1}, {1}, 8.0);
  const LadderElement inv = apply_L_inverse(e);
  CHECK(std::abs(inv.coeffs().at({1, 1}) - 2.0) < 1e-15);
  CHECK_THROWS_WITH(apply_L_inverse(LadderElement::state({2.0}, {3}, {0})), "ℒ⁻¹ undefined on ker ℒ");
}

TEST_CASE("ladder commutators and positivity") {
  std::mt19937_64 rng(3);
  const std::vector<double> a{1.7};
  for (int t = 0; t < 10; ++t) {
    const LadderElement f = random_element(rng, a, 6);
    const LadderElement c = apply_b(apply_b_plus(f, 0), 0) + apply_b_plus(apply_b(f, 0), 0) * -1.0;
    CHECK((c + f * (2.0 * a[0])).max_abs() <= 1e-12 * f.max_abs());
    CHECK((apply_L(f) + apply_b(apply_b_plus(f, 0), 0) * -1.0).max_abs() <= 1e-12 * f.max_abs());
    const cplx lff = inner_product(apply_L(f), f);
    CHECK(lff.real() >= -1e-12);
    CHECK(std::abs(lff.imag()) <= 1e-9 * std::max(1.0, lff.real()));
  }
  const LadderElement kernel = LadderElement::state(a, {4}, {0}, cplx(0.3, 0.2));
  CHECK(std::abs(inner_product(apply_L(kernel), kernel)) == 0.0);
}

TEST_CASE("multiplication by z and zbar matches the ladder commutators") {
  std::mt19937_64 rng(4);
  const std::vector<double> a{2.3};
  for (int t = 0; t < 10; ++t) {
    const LadderElement f = random_element(rng, a, 5);
    const LadderElement bz = apply_b(multiply_z(f, 0), 0) + multiply_z(apply_b(f, 0), 0) * -1.0 + f * 2.0;
    CHECK(bz.max_abs() <= 1e-12 * f.max_abs());
    const LadderElement bzb =
        apply_b_plus(multiply_zbar(f, 0), 0) + multiply_zbar(apply_b_plus(f, 0), 0) * -1.0 + f * -2.0;
    CHECK(bzb.max_abs() <= 1e-12 * f.max_abs());
  }
}

TEST_CASE("J12 at a constant-field point vanishes") {
  const FieldSpec c = build_field({1.0, 1.0}, 1, {});
  WellData w;
  w.x0 = {0.5, 0.5};
  w.tau0 = kTwoPi;
  w.a = {kTwoPi};
  const J12Result r = compute_J12(w, jcal_jet(c, w.x0));
  CHECK(std::abs(r.value) < 1e-14);
  CHECK(r.scalarity_defect < 1e-12);
}

TEST_CASE("J12 at the two-mode well is zero, scalar and frame independent") {
  const FieldSpec f = build_field({1.0, 1.0}, 1, conjugate_closure({{1, 0, {0.5, 0.0}}, {0, 1, {0.5, 0.0}}}));
  const WellData w = find_wells(f)[0];
  const JcalJet jet = jcal_jet(f, w.x0);
  const J12Result r = compute_J12(w, jet);
  CHECK(std::abs(r.value) < 1e-10);
  CHECK(r.scalarity_defect <= 1e-8);
  const J12Result rot = compute_J12(w, rotate_jet(jet, 0.7));
  CHECK(std::abs(rot.value - r.value) < 1e-9);
}

TEST_CASE("J12 is frame independent for an anisotropic well") {
  const FieldSpec f = build_field({1.0, 1.0}, 1, conjugate_closure({{1, 0, {0.5, 0.0}}, {0, 1, {0.2, 0.0}}}));
  const WellData w = find_wells(f)[0];
  const JcalJet jet = jcal_jet(f, w.x0);
  const double v = compute_J12(w, jet).value;
  CHECK(std::abs(compute_J12(w, rotate_jet(jet, 0.3)).value - v) < 1e-9);
  CHECK(std::abs(compute_J12(w, rotate_jet(jet, 1.9)).value - v) < 1e-9);
}
