#include <benchmark/benchmark.h>

#include "specindex/contour.hpp"
#include "specindex/numkit.hpp"
#include "specindex/random.hpp"
#include "specindex/schrodinger.hpp"

using namespace specindex;

namespace {

schrodinger::SchrodingerModel rectangle(Index n) {
  return schrodinger::build_rectangle(n, n, 1.0, 1.0, [](double x, double y) { return Complex(x * y, x - y); });
}

void BM_DenseLu(benchmark::State& state) {
  Rng rng(1);
  const CMatrix a = rng.gaussian_matrix(state.range(0), state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(numkit::LuFactorization(a).determinant());
}
BENCHMARK(BM_DenseLu)->Arg(8)->Arg(32)->Arg(128);

void BM_BandLu(benchmark::State& state) {
  const Index n = state.range(0);
  const auto m = rectangle(n);
  CMatrix k = schrodinger::assemble(m, schrodinger::Dirichlet{});
  k.diagonal().array() -= Complex(1.0, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(numkit::BandLuFactorization(k, n, n).solve(CMatrix::Identity(k.rows(), 1)));
}
BENCHMARK(BM_BandLu)->Arg(6)->Arg(12)->Arg(24);

void BM_DtnJet(benchmark::State& state) {
  const auto m = rectangle(state.range(0));
  const schrodinger::DtnEvaluator dtn(m);
  for (auto _ : state) benchmark::DoNotOptimize(dtn.jet(Complex(1.0, 0.5)));
}
BENCHMARK(BM_DtnJet)->Arg(6)->Arg(12);

void BM_GeneralizedIndex(benchmark::State& state) {
  const auto m = rectangle(6);
  Rng rng(2);
  const CMatrix theta = rng.matrix_with_norm(m.boundary_count(), m.boundary_count(), 2.0);
  const auto f = schrodinger::dtn_minus_theta(m, theta);
  const contour::Contour c{Complex(3.0, 1.5), 0.5, static_cast<int>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(contour::generalized_index(f, c));
}
BENCHMARK(BM_GeneralizedIndex)->Arg(16)->Arg(64);

void BM_ResolventTrace(benchmark::State& state) {
  Rng rng(3);
  const numkit::ResolventTrace rt(rng.gaussian_matrix(state.range(0), state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(rt(Complex(0.3, 0.7)));
}
BENCHMARK(BM_ResolventTrace)->Arg(16)->Arg(64);

}  // namespace

BENCHMARK_MAIN();
