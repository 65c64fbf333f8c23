#include <benchmark/benchmark.h>

#include "resdet/functionals.hpp"
#include "resdet/oplib.hpp"

using namespace resdet;

namespace {

NumericSettings settings(benchmark::State& state) {
  NumericSettings s;
  s.estimate_error = false;
  s.x_grid = static_cast<int>(state.range(1));
  s.mode = state.range(0) ? ExecutionMode::Parallel : ExecutionMode::Serial;
  return s;
}

void label(benchmark::State& state) { state.SetLabel(state.range(0) ? "parallel" : "serial"); }

void BM_DetresCurved(benchmark::State& state) {
  const NumericSettings s = settings(state);
  LaplaceSpec spec;
  MetricData m;
  m.conformal.push_back({{1, 0, 0, 0}, 0.1, 0.0});
  spec.chart = std::make_shared<const TorusChart>(build_metric(2, m, s.x_grid));
  spec.scalar_potential.push_back({{0, 1, 0, 0}, 0.3, 0.0});
  const ClassicalSymbol a = laplace_symbol(spec);
  for (auto _ : state) benchmark::DoNotOptimize(log_det_res(a, s).value);
  label(state);
}

void BM_DetresRandomPair(benchmark::State& state) {
  const NumericSettings s = settings(state);
  const ClassicalSymbol a = compose_symbols(random_elliptic_symbol(2, 2, 2, 2001), random_elliptic_symbol(2, 2, 1, 2501));
  for (auto _ : state) benchmark::DoNotOptimize(log_det_res(a, s).value);
  label(state);
}

void BM_ResidueNegativeOrder(benchmark::State& state) {
  const NumericSettings s = settings(state);
  const ClassicalSymbol q = negative_order_symbol(-2, 72, 2, 2);
  for (auto _ : state) benchmark::DoNotOptimize(residue_trace(q, s).value);
  label(state);
}

}  // namespace

BENCHMARK(BM_DetresCurved)->ArgsProduct({{0, 1}, {8, 16}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DetresRandomPair)->ArgsProduct({{0, 1}, {4, 8}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ResidueNegativeOrder)->ArgsProduct({{0, 1}, {8, 16}})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
