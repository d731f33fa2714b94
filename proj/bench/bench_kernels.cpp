// Serial reference against the OpenMP kernels.

#include <benchmark/benchmark.h>

#include <random>

#include "support/random_inputs.hpp"
#include "toric/mamixint.hpp"
#include "toric/ronkin.hpp"

using namespace toric;

namespace {

LaurentPoly trinomial() {
  return LaurentPoly(2, {{lattice_point({0, 0}), Rational(1)}, {lattice_point({1, 0}), Rational(1)},
                         {lattice_point({0, 1}), Rational(1)}});
}

Execution exec_of(const benchmark::State& state) {
  return state.range(1) ? Execution::parallel : Execution::serial;
}

void BM_TorusMean(benchmark::State& state) {
  const LaurentPoly f = trinomial();
  const std::vector<double> u{0.25, -0.5};
  const int K = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(torus_log_mean(f, u, K, exec_of(state)).value);
  state.SetItemsProcessed(state.iterations() * K * K);
}
BENCHMARK(BM_TorusMean)->ArgsProduct({{256, 1024}, {0, 1}})->ArgNames({"K", "parallel"});

void BM_TorusMeanReference(benchmark::State& state) {
  const LaurentPoly f = trinomial();
  const std::vector<double> u{0.25, -0.5};
  const int K = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(torus_log_mean_reference(f, u, K));
  state.SetItemsProcessed(state.iterations() * K * K);
}
BENCHMARK(BM_TorusMeanReference)->Arg(256)->Arg(1024)->ArgName("K");

void BM_RonkinDual(benchmark::State& state) {
  const LaurentPoly f = trinomial();
  const DualGrid grid{Rational(4), static_cast<int>(state.range(0))};
  const QuadratureSpec spec{64};
  for (auto _ : state) benchmark::DoNotOptimize(ronkin_concave_approx(f, PlaceQ::arch(), grid, spec, exec_of(state)));
}
BENCHMARK(BM_RonkinDual)->ArgsProduct({{8, 16}, {0, 1}})->ArgNames({"k", "parallel"})->Unit(benchmark::kMillisecond);

void BM_MixedIntegral(benchmark::State& state) {
  std::mt19937_64 rng(7);
  const int n = static_cast<int>(state.range(0));
  std::vector<ConcaveFn> gs;
  for (int i = 0; i <= n; ++i) gs.push_back(testing::random_concave(rng, n, 6, testing::ValueKind::linlog));
  for (auto _ : state) benchmark::DoNotOptimize(mixed_integral(gs, exec_of(state)));
}
BENCHMARK(BM_MixedIntegral)->ArgsProduct({{2, 3}, {0, 1}})->ArgNames({"n", "parallel"})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
