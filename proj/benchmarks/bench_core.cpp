#include <benchmark/benchmark.h>

#include "sirq/final_size.hpp"
#include "sirq/integrator.hpp"
#include "sirq/objective.hpp"
#include "sirq/switching.hpp"

namespace {

constexpr sirq::EpidemicState kInitial{1.0 - 1e-6, 1e-6};
const sirq::ModelParams kBaseline{0.01, 1.5, 0.0, 1.5, 2600.0, 60.0, 0.0};
const sirq::ModelParams kGeneral{0.01, 2.2, 0.3, 1.5, 3200.0, 180.0, 1e-5};

void BM_x_infinity(benchmark::State& state) {
  const sirq::EpidemicState s{0.62, 0.08};
  for (auto _ : state) benchmark::DoNotOptimize(sirq::x_infinity(kBaseline, s));
}
BENCHMARK(BM_x_infinity);

// One objective evaluation is what the oracle pays per grid cell.
void BM_objective(benchmark::State& state) {
  sirq::IntegratorOptions opt;
  opt.min_steps_per_segment = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(sirq::objective(kGeneral, kInitial, {3000.0, 150.0}, opt));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_objective)->Arg(500)->Arg(2000)->Arg(8000)->Unit(benchmark::kMicrosecond);

void BM_trajectory(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(sirq::integrate(kBaseline, kInitial, {2527.1, 60.0}, kBaseline.T));
  }
}
BENCHMARK(BM_trajectory)->Unit(benchmark::kMicrosecond);

void BM_prefix_cache(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(sirq::PrefixCache(kGeneral, kInitial));
}
BENCHMARK(BM_prefix_cache)->Unit(benchmark::kMicrosecond);

// Queries after the shared prefix is cached.
void BM_switching_w(benchmark::State& state) {
  const sirq::SwitchingEvaluator eval(kGeneral, kInitial);
  double t = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(eval.w(t));
    t = t > 3000.0 ? 0.0 : t + 37.0;
  }
}
BENCHMARK(BM_switching_w)->Unit(benchmark::kMicrosecond);

void BM_gradient(benchmark::State& state) {
  const sirq::SwitchingEvaluator eval(kGeneral, kInitial);
  for (auto _ : state) {
    benchmark::DoNotOptimize(eval.dJ_dt1({1500.0, 90.0}));
    benchmark::DoNotOptimize(eval.dJ_deta({1500.0, 90.0}));
  }
}
BENCHMARK(BM_gradient)->Unit(benchmark::kMicrosecond);

}  // namespace
