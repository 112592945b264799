#include <benchmark/benchmark.h>

#include "fcmi/baselines.hpp"
#include "fcmi/correlation.hpp"
#include "fcmi/fcmi.hpp"
#include "fcmi/missingness.hpp"
#include "fcmi/random.hpp"
#include "fcmi/synthetic.hpp"

namespace {

using namespace fcmi;

Dataset injected(std::size_t rows, std::size_t distractors) {
  LinearSyntheticSpec s;
  s.rows = rows;
  s.distractors = distractors;
  MissingnessSpec m;
  return inject_missing(make_linear_synthetic(s), m).first;
}

void BM_Pearson(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(1);
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = rng.normal(), y[i] = x[i] + rng.normal();
  for (auto _ : state) benchmark::DoNotOptimize(pearson(x, y));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Pearson)->Range(256, 65536);

void BM_CorrelationVector(benchmark::State& state) {
  const Dataset d = injected(2000, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(correlation_vector(d, "target"));
}
BENCHMARK(BM_CorrelationVector)->Arg(4)->Arg(32);

void BM_FcmiImpute(benchmark::State& state) {
  const Dataset d = injected(static_cast<std::size_t>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(fcmi_impute(d, FcmiConfig{}));
}
BENCHMARK(BM_FcmiImpute)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_KnnImpute(benchmark::State& state) {
  const Dataset d = injected(static_cast<std::size_t>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(knn_impute(d));
}
BENCHMARK(BM_KnnImpute)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_IterativeImpute(benchmark::State& state) {
  const Dataset d = injected(static_cast<std::size_t>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(iterative_impute(d));
}
BENCHMARK(BM_IterativeImpute)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
