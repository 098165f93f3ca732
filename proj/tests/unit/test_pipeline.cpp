#include <doctest.h>

#include <cmath>
#include <sstream>

#include "magwell/config.hpp"
#include "magwell/pipeline.hpp"
#include "magwell/report.hpp"

using namespace magwell;

namespace {

FieldSpec two_mode() {
  return build_field({1.0, 1.0}, 1, conjugate_closure({{1, 0, {0.5, 0.0}}, {0, 1, {0.5, 0.0}}}));
}

}  // namespace

TEST_CASE("constant field: extrapolated Landau level") {
  const FieldSpec f = build_field({1.0, 1.0}, 1, {});
  const LatticeSpectrum s = lattice_spectrum(f, 8, {64, 128}, 8, {1e-8, 5000, 1});
  for (double l : s.extrapolated) CHECK(std::abs(l - 16.0 * kPi) / (16.0 * kPi) < 0.005);

  const LatticeSpectrum one = lattice_spectrum(f, 1, {32, 64}, 3, {1e-8, 5000, 1});
  CHECK(std::abs(one.extrapolated[0] - kTwoPi) / kTwoPi < 0.005);
  CHECK(one.grids.back().eigenvalues[1] - one.grids.back().eigenvalues[0] > 1.0);

  CHECK_THROWS_WITH(lattice_spectrum(f, 1, {64}, 3, {}), "need ≥2 grids");
  CHECK_THROWS_WITH(lattice_spectrum(f, 1, {32, 96}, 3, {}), "grids not nested/doubling");
}

TEST_CASE("lattice eigenvalues converge at second order") {
  const FieldSpec f = two_mode();
  const LatticeSpectrum s = lattice_spectrum(f, 4, {32, 64, 128}, 4, {1e-9, 5000, 2});
  for (int j = 0; j < 4; ++j) {
    const double d1 = s.grids[1].eigenvalues[j] - s.grids[0].eigenvalues[j];
    const double d2 = s.grids[2].eigenvalues[j] - s.grids[1].eigenvalues[j];
    const double factor = d1 / d2;
    CHECK(factor >= 2.5);
    CHECK(factor <= 6.0);
  }
}

TEST_CASE("LLL reduction dominates the full spectrum and matches the Landau cluster") {
  const FieldSpec f = build_field({1.0, 1.0}, 1, {});
  const LatticeOperator op = build_links(f, 4, 64, 64);
  const EigResult ren = solve_lattice(op, 8, {1e-9, 5000, 3}, true);
  const ClusterPartition cp = cluster_detect(ren.eigenvalues);
  CHECK(cp.size(0) == 4);
  const std::vector<double> reduced = lll_reduce(op, cp, ren);
  const EigResult full = solve_lattice(op, 4, {1e-9, 5000, 4});
  for (int j = 0; j < 4; ++j) CHECK(reduced[j] >= full.eigenvalues[j] - 1e-8);
}

TEST_CASE("localization profile") {
  const FieldSpec f = two_mode();
  const LatticeOperator op = build_links(f, 16, 64, 64);
  const EigResult e = solve_lattice(op, 1, {1e-8, 5000, 5});
  const WellData w = find_wells(f)[0];
  const auto m = localization_profile(op, e.eigenvectors.col(0), w, {0.0, 0.1, 0.3});
  CHECK(m[0] == doctest::Approx(1.0));
  CHECK(m[1] < m[0]);
  CHECK(m[2] < m[1]);
}

TEST_CASE("fits") {
  const FitResult lin = linear_fit({1, 2, 3, 4}, {3, 5, 7, 9});
  CHECK(lin.slope == doctest::Approx(2.0));
  CHECK(lin.intercept == doctest::Approx(1.0));
  CHECK(lin.r_squared == doctest::Approx(1.0));
  const FitResult pw = power_fit({1, 2, 4, 8}, {3.0, 1.5, 0.75, 0.375});
  CHECK(pw.slope == doctest::Approx(-1.0));
  const InterceptFit ic = intercept_fit({16, 32, 64, 128}, {0.5 + 2.0 / 16, 0.5 + 2.0 / 32, 0.5 + 2.0 / 64, 0.5 + 2.0 / 128},
                                        {1e-4, 1e-4, 1e-4, 1e-4});
  CHECK(ic.value == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(ic.error_bar > 0.0);
}

TEST_CASE("sweep argument checks") {
  const FieldSpec f = two_mode();
  CHECK_THROWS_WITH(sweep(f, {}, 1, {32, 64}, {}), "empty p_list");
  CHECK_THROWS(sweep(f, {1, 2, 3}, 1, {32, 64}, {}));
  CHECK_THROWS(gap_track(f, {}, {64}, {}));
}

TEST_CASE("model side of the two-mode field") {
  const ModelSide side = model_side(two_mode(), 3);
  REQUIRE(side.wells.size() == 1);
  CHECK(std::abs(side.j12[0]) < 1e-10);
  for (int j = 0; j < 3; ++j) CHECK(side.levels[j].mu == doctest::Approx(9.21707 * (j + 1)).epsilon(1e-6));
  const ModelTable t = model_table(two_mode(), 4);
  CHECK(t.max_disagreement < 1e-8);
  CHECK(t.levels.size() == 4);
}

TEST_CASE("config parsing") {
  std::istringstream good(R"(
# comment
[torus]
l1 = 1.0
l2 = 1.0
[field]
degree = 1
mode = 1 0 0.5 0.0
mode = 0 1 0.5 0.0   # trailing comment
[sweep]
p_list = 16 32 64 128
grids = 128 256
)");
  const RunConfig cfg = parse_config(good);
  CHECK(cfg.modes.size() == 2);
  CHECK(cfg.sweep.p_list.size() == 4);
  CHECK(cfg.field().b({0.5, 0.5}) == doctest::Approx(kTwoPi - 2.0));

  std::istringstream missing("[torus]\nl1 = 1\nl2 = 1\n");
  CHECK_THROWS_WITH(parse_config(missing), "missing section [field]");
  std::istringstream bad("[torus]\nl1 = x\n");
  CHECK_THROWS_WITH(parse_config(bad), "config line 2: bad value for l1");
  std::istringstream unknown("[torus]\nfoo = 1\n");
  CHECK_THROWS_WITH(parse_config(unknown), "config line 2: unknown key torus.foo");
  CHECK_THROWS_WITH(load_config("/nonexistent/x.cfg"), "cannot read config: /nonexistent/x.cfg");
}

TEST_CASE("report formatting") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(2.0) == "2");
  const ModelTable t = model_table(two_mode(), 4);
  const std::string csv = model_csv(t);
  CHECK(csv.rfind("j,mu,cutoff,convergence\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
  CHECK(model_csv(t) == csv);
}
