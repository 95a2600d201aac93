#include <benchmark/benchmark.h>

#include "sirq/oracle.hpp"
#include "sirq/planner.hpp"
#include "sirq/pmp.hpp"

namespace {

constexpr sirq::EpidemicState kInitial{1.0 - 1e-6, 1e-6};

sirq::ModelParams baseline(double tau) { return {0.01, 1.5, 0.0, 1.5, 2600.0, tau, 0.0}; }

// tau = 60, 120, 260 hit cases 2, 3 and 4.
void BM_plan(benchmark::State& state) {
  const sirq::ModelParams p = baseline(static_cast<double>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(sirq::plan(p, kInitial));
}
BENCHMARK(BM_plan)->Arg(60)->Arg(120)->Arg(260)->Unit(benchmark::kMillisecond);

void BM_plan_corollary(benchmark::State& state) {
  const sirq::ModelParams p = baseline(60.0);
  for (auto _ : state) benchmark::DoNotOptimize(sirq::plan_corollary_sigma1_zero(p, kInitial));
}
BENCHMARK(BM_plan_corollary)->Unit(benchmark::kMillisecond);

void BM_kappa_condition(benchmark::State& state) {
  const sirq::ModelParams p{0.01, 2.2, 0.3, 1.5, 3200.0, 180.0, 1e-5};
  for (auto _ : state) benchmark::DoNotOptimize(sirq::check_kappa_condition(p, kInitial));
}
BENCHMARK(BM_kappa_condition)->Unit(benchmark::kMillisecond);

void BM_grid_search(benchmark::State& state) {
  const sirq::ModelParams p = baseline(100.0);
  const auto threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sirq::grid_search(p, kInitial, 100, 25, {}, threads));
  state.SetItemsProcessed(state.iterations() * 100 * 25);
}
BENCHMARK(BM_grid_search)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_refine(benchmark::State& state) {
  const sirq::ModelParams p = baseline(260.0);
  for (auto _ : state) benchmark::DoNotOptimize(sirq::refine(p, kInitial, {2380.0, 200.0}, 20.0));
}
BENCHMARK(BM_refine)->Unit(benchmark::kMillisecond);

void BM_verify_necessary_conditions(benchmark::State& state) {
  const sirq::ModelParams p = baseline(60.0);
  const sirq::Schedule s = sirq::plan(p, kInitial).schedule();
  for (auto _ : state) benchmark::DoNotOptimize(sirq::verify_necessary_conditions(p, kInitial, s));
}
BENCHMARK(BM_verify_necessary_conditions)->Unit(benchmark::kMillisecond);

}  // namespace
