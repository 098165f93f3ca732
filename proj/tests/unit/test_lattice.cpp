#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "magwell/lattice.hpp"

using namespace magwell;

namespace {

FieldSpec two_mode() {
  return build_field({1.0, 1.0}, 1, conjugate_closure({{1, 0, {0.5, 0.0}}, {0, 1, {0.5, 0.0}}}));
}

std::vector<cplx> random_vector(size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::vector<cplx> v(n);
  for (auto& z : v) z = {g(rng), g(rng)};
  return v;
}

cplx dot(const std::vector<cplx>& x, const std::vector<cplx>& y) {
  cplx s = 0.0;
  for (size_t i = 0; i < x.size(); ++i) s += std::conj(x[i]) * y[i];
  return s;
}

}  // namespace

TEST_CASE("constant-field plaquettes carry equal flux") {
  const LatticeOperator op = build_links(build_field({1.0, 1.0}, 1, {}), 1, 8, 8);
  const auto ph = plaquette_phases(op);
  // The flux per cell is 2 pi / 64; parallel transport around a cell gives exp(-i flux).
  for (const cplx& z : ph) CHECK(std::abs(z - std::polar(1.0, -kTwoPi / 64.0)) < 1e-12);
  const auto flux = plaquette_fluxes(build_field({1.0, 1.0}, 1, {}), 1, 8, 8);
  for (double f : flux) CHECK(f == doctest::Approx(kTwoPi / 64.0).epsilon(1e-13));
}

TEST_CASE("row and column gauges give the same plaquette phases") {
  const FieldSpec f = two_mode();
  const auto a = plaquette_phases(build_links(f, 3, 32, 32, GaugeChoice::kColumnAccumulate));
  const auto b = plaquette_phases(build_links(f, 3, 32, 32, GaugeChoice::kRowAccumulate));
  double worst = 0.0;
  for (size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  CHECK(worst < 1e-11);
}

TEST_CASE("free Laplacian on plane waves") {
  const int n = 16;
  const std::vector<cplx> ones(n * n, 1.0);
  const LatticeOperator op(build_field({1.0, 1.0}, 1, {}), 1, n, n, ones, ones);
  const auto zero = matvec(op, ones);
  for (const cplx& z : zero) CHECK(std::abs(z) < 1e-10);

  const int k1 = 3, k2 = -2;
  std::vector<cplx> v(n * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) v[op.index(i, j)] = std::polar(1.0, kTwoPi * (k1 * i + k2 * j) / n);
  const double a = 1.0 / n;
  const double lam = 4.0 / (a * a) * (std::pow(std::sin(kPi * k1 / n), 2) + std::pow(std::sin(kPi * k2 / n), 2));
  const auto hv = matvec(op, v);
  double worst = 0.0;
  for (size_t i = 0; i < v.size(); ++i) worst = std::max(worst, std::abs(hv[i] - lam * v[i]));
  CHECK(worst < 1e-9);
}

TEST_CASE("operator is Hermitian and positive semidefinite") {
  const LatticeOperator op = build_links(two_mode(), 4, 32, 32);
  std::mt19937_64 rng(1);
  for (int t = 0; t < 20; ++t) {
    const auto v = random_vector(op.dimension(), rng);
    const auto w = random_vector(op.dimension(), rng);
    const cplx vhw = dot(v, matvec(op, w));
    const cplx hvw = dot(matvec(op, v), w);
    CHECK(std::abs(vhw - hvw) < 1e-9 * std::abs(vhw));
    CHECK(dot(v, matvec(op, v)).real() >= -1e-10 * dot(v, v).real());
  }
}

TEST_CASE("gauge transforms") {
  const LatticeOperator op = build_links(two_mode(), 4, 16, 16);
  const std::vector<cplx> trivial(op.dimension(), 1.0);
  const LatticeOperator same = gauge_transform(op, trivial);
  CHECK(same.u1() == op.u1());
  CHECK(same.u2() == op.u2());

  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> ph(0.0, kTwoPi);
  std::vector<cplx> g(op.dimension());
  for (auto& z : g) z = std::polar(1.0, ph(rng));
  const LatticeOperator t = gauge_transform(op, g);
  // H' (g v) = g (H v) with g acting pointwise.
  const auto v = random_vector(op.dimension(), rng);
  std::vector<cplx> gv(v.size());
  for (size_t i = 0; i < v.size(); ++i) gv[i] = g[i] * v[i];
  const auto lhs = matvec(t, gv);
  const auto hv = matvec(op, v);
  double worst = 0.0;
  for (size_t i = 0; i < v.size(); ++i) worst = std::max(worst, std::abs(lhs[i] - g[i] * hv[i]));
  CHECK(worst < 1e-9);
  const auto p0 = plaquette_phases(op), p1 = plaquette_phases(t);
  for (size_t i = 0; i < p0.size(); ++i) CHECK(std::abs(p0[i] - p1[i]) < 1e-12);
  CHECK_THROWS(gauge_transform(op, std::vector<cplx>(op.dimension(), 2.0)));
}

TEST_CASE("renormalized matvec subtracts p tau") {
  const LatticeOperator op = build_links(two_mode(), 2, 16, 16);
  std::mt19937_64 rng(9);
  const auto v = random_vector(op.dimension(), rng);
  std::vector<cplx> r(v.size());
  renormalized_matvec(op, v, r);
  const auto h = matvec(op, v);
  for (size_t i = 0; i < v.size(); ++i)
    CHECK(std::abs(r[i] - (h[i] - 2.0 * op.tau_samples()[i] * v[i])) < 1e-9);
}

TEST_CASE("resolution floor") {
  CHECK_THROWS_WITH(build_links(two_mode(), 256, 8, 8), "grid under-resolves magnetic length");
  CHECK(build_links(two_mode(), 64, 24, 24).under_resolved());
}

TEST_CASE("link dump round trip") {
  const LatticeOperator op = build_links(two_mode(), 3, 8, 8);
  std::stringstream ss;
  write_links(op, ss);
  CHECK(ss.str().substr(0, 4) == "MAGL");
  const LinkDump d = read_links(ss);
  CHECK(d.n1 == 8);
  CHECK(d.p == 3);
  REQUIRE(d.u1.size() == 64);
  CHECK(std::abs(std::complex<double>(d.u1[5]) - op.u1()[5]) < 1e-6);
}
