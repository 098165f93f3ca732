#include <benchmark/benchmark.h>

#include <random>

#include "magwell/fock.hpp"
#include "magwell/lattice.hpp"
#include "magwell/pipeline.hpp"

using namespace magwell;

namespace {

FieldSpec two_mode() {
  return build_field({1.0, 1.0}, 1, conjugate_closure({{1, 0, {0.5, 0.0}}, {0, 1, {0.5, 0.0}}}));
}

void BM_Matvec(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const LatticeOperator op = build_links(two_mode(), 16, n, n);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  std::vector<cplx> v(op.dimension()), w(op.dimension());
  for (auto& z : v) z = {g(rng), g(rng)};
  for (auto _ : state) {
    matvec(op, v, w);
    benchmark::DoNotOptimize(w.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(op.dimension()));
}
BENCHMARK(BM_Matvec)->Arg(128)->Arg(256)->Arg(512);

void BM_BuildLinks(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const FieldSpec f = two_mode();
  for (auto _ : state) benchmark::DoNotOptimize(build_links(f, 16, n, n));
}
BENCHMARK(BM_BuildLinks)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_LowestEigenpairs(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const LatticeOperator op = build_links(two_mode(), 16, n, n);
  for (auto _ : state) benchmark::DoNotOptimize(solve_lattice(op, 3, {1e-8, 5000, 1}));
}
BENCHMARK(BM_LowestEigenpairs)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_Toeplitz(benchmark::State& state) {
  const FockBasis b = lll_basis({4.0}, static_cast<int>(state.range(0)));
  Eigen::Matrix2d q;
  q << 2.0, 0.3, 0.3, 1.0;
  const ComplexPolynomial s = ComplexPolynomial::quadratic_form(q);
  for (auto _ : state) benchmark::DoNotOptimize(toeplitz_matrix(b, s));
}
BENCHMARK(BM_Toeplitz)->Arg(32)->Arg(64);

}  // namespace

BENCHMARK_MAIN();
