#include <benchmark/benchmark.h>

#include <nwidths/ballwidths.hpp>
#include <nwidths/discretization.hpp>
#include <nwidths/exponents.hpp>
#include <nwidths/sampling.hpp>

#include "tuples.hpp"

#include <cmath>

using namespace nwidths;

namespace {

const AbstractParams& case9a() {
  static const AbstractParams p = nwidths::testing::abstract_tuple("4/5", "3/5", "1/4", "3/2", "3/4", "2", "-1/2");
  return p;
}

void BM_ThetaTable(benchmark::State& state) {
  const auto tuples = sample_spanning(1, 64);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(theta_table(tuples[i++ % tuples.size()]));
  }
}
BENCHMARK(BM_ThetaTable);

void BM_IdentitySuite(benchmark::State& state) {
  const auto tuples = sample_spanning(2, 64);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(identity_suite(tuples[i++ % tuples.size()]));
  }
}
BENCHMARK(BM_IdentitySuite);

void BM_PartitionScan(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(partition_scan(static_cast<int>(state.range(0))));
}
BENCHMARK(BM_PartitionScan)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_EvaluateS(benchmark::State& state) {
  const double n = std::ldexp(1.0, static_cast<int>(state.range(0)));
  const auto& p = case9a();
  const auto id = classify(p.p0, p.p1, p.inv_q);
  const auto alloc = choose_allocation(p, id, n);
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_S(p, n, alloc));
}
BENCHMARK(BM_EvaluateS)->DenseRange(12, 24, 4)->Unit(benchmark::kMicrosecond);

void BM_FitExponent(benchmark::State& state) {
  const auto grid = nwidths::testing::dyadic_grid(10, 24);
  for (auto _ : state) benchmark::DoNotOptimize(fit_exponent(case9a(), grid));
}
BENCHMARK(BM_FitExponent)->Unit(benchmark::kMillisecond);

void BM_BruteForce(benchmark::State& state) {
  const BallSpec spec{LpExponent::infinity(), LpExponent::from_inverse(make_rational(1, 2)), state.range(0),
                      state.range(0) / 2};
  BruteForceOptions options;
  options.parallel = false;
  for (auto _ : state) {
    try {
      benchmark::DoNotOptimize(brute_force_linear_width(spec, 4'000'000, options));
    } catch (const BudgetExceeded& e) {
      benchmark::DoNotOptimize(e.best_value);
    }
  }
}
BENCHMARK(BM_BruteForce)->DenseRange(2, 6, 2)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
