#include <benchmark/benchmark.h>

#include "sbmsdp/cluster.hpp"
#include "sbmsdp/linalg.hpp"
#include "sbmsdp/model.hpp"
#include "sbmsdp/sdp.hpp"

namespace {

using namespace sbmsdp;

SymMatrix planted_yhat(std::size_t n) {
  const auto labels = ClusterLabels::contiguous(n, 2);
  const Graph g = generate_sbm({n, 2, 0.5, 0.1}, labels, 1);
  // A centred adjacency has a spread spectrum, like the ADMM iterates.
  return SymMatrix(Matrix(g.adjacency().dense().array() - 0.3));
}

void BM_SymEigen(benchmark::State& state, EigenMethod method) {
  const SymMatrix m = planted_yhat(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(sym_eigen(m, method));
  state.SetComplexityN(state.range(0));
}
BENCHMARK_CAPTURE(BM_SymEigen, jacobi, EigenMethod::kJacobi)->RangeMultiplier(2)->Range(32, 128);
BENCHMARK_CAPTURE(BM_SymEigen, tridiagonal, EigenMethod::kTridiagonal)
    ->RangeMultiplier(2)
    ->Range(32, 256);

void BM_PsdProject(benchmark::State& state) {
  const SymMatrix m = planted_yhat(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(psd_project(m, EigenMethod::kTridiagonal));
}
BENCHMARK(BM_PsdProject)->RangeMultiplier(2)->Range(64, 256);

void BM_BoxDiagSumProject(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const SymMatrix m = planted_yhat(n);
  const double total = static_cast<double>(n * n) / 2.0;
  for (auto _ : state) benchmark::DoNotOptimize(box_diag_sum_project(m, total));
}
BENCHMARK(BM_BoxDiagSumProject)->RangeMultiplier(2)->Range(64, 256);

void BM_SolveSdp1(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Graph g = generate_sbm({n, 2, 0.5, 0.1}, ClusterLabels::contiguous(n, 2), 1);
  int iterations = 0;
  for (auto _ : state) iterations = solve_sdp1(g, 0.3).iterations;
  state.counters["admm_iters"] = iterations;
}
BENCHMARK(BM_SolveSdp1)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_KmediansExtract(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Graph g = generate_sbm({n, 4, 0.5, 0.3}, ClusterLabels::contiguous(n, 4), 2);
  const SymMatrix yhat = solve_sdp1(g, 0.4).yhat;
  for (auto _ : state) benchmark::DoNotOptimize(kmedians_extract(yhat, 4, 0));
}
BENCHMARK(BM_KmediansExtract)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
