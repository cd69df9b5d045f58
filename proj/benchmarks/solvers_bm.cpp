#include <benchmark/benchmark.h>

#include <random>

#include "reference_cases.hpp"
#include "powcap/gpsolve.hpp"
#include "powcap/linprog.hpp"
#include "powcap/maxmin.hpp"
#include "powcap/oracle.hpp"
#include "powcap/posyfit.hpp"

using namespace powcap;

static void BM_MaxMinFourLink(benchmark::State& state) {
  const NetworkModel m = testing::maxmin_four_link();
  SolverOptions opts;
  opts.eps = 1e-9;
  for (auto _ : state) benchmark::DoNotOptimize(solve_maxmin(m, opts));
}
BENCHMARK(BM_MaxMinFourLink);

static void BM_MaxMinTenLink(benchmark::State& state) {
  const NetworkModel m = testing::maxmin_ten_link();
  for (auto _ : state) benchmark::DoNotOptimize(solve_maxmin(m));
}
BENCHMARK(BM_MaxMinTenLink);

static void BM_MaxMinRandom(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const NetworkModel m = oracle::random_instance(rng, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(solve_maxmin(m));
}
BENCHMARK(BM_MaxMinRandom)->Arg(4)->Arg(16)->Arg(32);

static void BM_FeasibilityLp(benchmark::State& state) {
  const NetworkModel m = testing::maxmin_ten_link();
  const Vector gamma = threshold_gamma(m.weights, 0.05);
  for (auto _ : state) benchmark::DoNotOptimize(solve_lp(threshold_constraints(m, gamma)));
}
BENCHMARK(BM_FeasibilityLp);

static void BM_FixedPoint(benchmark::State& state) {
  const NetworkModel m = testing::maxmin_ten_link();
  const Vector gamma = threshold_gamma(m.weights, 0.05);
  for (auto _ : state) benchmark::DoNotOptimize(oracle::fixed_point_feasibility(m, gamma));
}
BENCHMARK(BM_FixedPoint);

static void BM_Fit(benchmark::State& state) {
  const int t = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(fit(t, {0.0, static_cast<double>(t)}));
}
BENCHMARK(BM_Fit)->Arg(5)->Arg(20)->Unit(benchmark::kMillisecond);

static void BM_LatencyFourLink(benchmark::State& state) {
  const NetworkModel m = testing::latency_four_link();
  for (auto _ : state) benchmark::DoNotOptimize(solve_latency(m));
}
BENCHMARK(BM_LatencyFourLink)->Unit(benchmark::kMillisecond);

static void BM_LatencyTenLink(benchmark::State& state) {
  const NetworkModel m = testing::latency_ten_link();
  const GpProblem problem = build_gp(m, fit(20, {0.0, 20.0}).first);
  for (auto _ : state) benchmark::DoNotOptimize(solve_gp(problem));
}
BENCHMARK(BM_LatencyTenLink)->Unit(benchmark::kMillisecond);

static void BM_GridMaxMin(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const NetworkModel m = oracle::random_instance(rng, 2);
  for (auto _ : state) benchmark::DoNotOptimize(oracle::grid_search_maxmin(m, {401}));
}
BENCHMARK(BM_GridMaxMin)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
