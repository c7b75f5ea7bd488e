#include <benchmark/benchmark.h>
#include <spdlog/spdlog.h>

#include <cmath>

#include "optcbf/oracle.hpp"
#include "optcbf/second_order.hpp"
#include "optcbf/sim.hpp"

namespace {

using namespace optcbf;

BarrierSpec acc() {
  return acc_headway_barrier(
      {10.0, ExogenousSignal::constant_speed(40.0, 1.0), ControlBounds(5.0), 1.0});
}

void BM_AlphaConstant(benchmark::State& state) {
  const EnvelopeFunction env = EnvelopeFunction::constant(-5.0);
  double b = -10.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(alpha(env, b));
    b = b < -49.0 ? -0.5 : b - 0.37;
  }
}
BENCHMARK(BM_AlphaConstant);

void BM_AlphaQuadrature(benchmark::State& state) {
  const EnvelopeFunction env =
      EnvelopeFunction::from_function([](double s) { return -5.0 + 0.05 * std::sin(s); });
  double b = -10.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(alpha(env, b));
    b = b < -49.0 ? -0.5 : b - 0.37;
  }
}
BENCHMARK(BM_AlphaQuadrature);

void BM_FullBrakingRollout(benchmark::State& state) {
  const BarrierSpec spec = acc();
  RolloutConfig cfg;
  cfg.dt = 1.0 / static_cast<double>(state.range(0));
  const StateVector x0 = spec.lift(-10.0, 10.0, 0.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(full_braking_rollout(spec, ControlBounds(5.0), x0, 0.0, cfg).max_b);
  }
}
BENCHMARK(BM_FullBrakingRollout)->Arg(1000)->Arg(10000)->Unit(benchmark::kMicrosecond);

void BM_GridRow(benchmark::State& state) {
  const BarrierSpec spec = acc();
  GridSpec grid;
  // Two b values, the smallest grid the oracle accepts.
  grid.b_count = 2;
  grid.b_min = -25.0;
  grid.b_max = -24.5;
  RolloutConfig cfg;
  cfg.dt = 1e-3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(grid_safe_set(spec, ControlBounds(5.0), grid, cfg).cells.size());
  }
}
BENCHMARK(BM_GridRow)->Unit(benchmark::kMillisecond);

void BM_RunScenario(benchmark::State& state) {
  ScenarioConfig cfg = ScenarioConfig::closing();
  cfg.controller = static_cast<ControllerKind>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_scenario(cfg).metrics.max_b);
  }
}
BENCHMARK(BM_RunScenario)
    ->Arg(static_cast<int>(ControllerKind::kOptimal))
    ->Arg(static_cast<int>(ControllerKind::kLinear))
    ->Unit(benchmark::kMillisecond);

}  // namespace

int main(int argc, char** argv) {
  // The linear scenario warns on every run.
  spdlog::set_level(spdlog::level::off);
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
