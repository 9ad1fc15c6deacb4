#include <benchmark/benchmark.h>

#include "netdiag/simulator.hpp"

using namespace netdiag;

namespace {

Topology linear(int hosts) { return generate_topology(TopologyKind::linear(), hosts, ControlMode::OutOfBand); }

void BM_BuildLinear(benchmark::State& state) {
  const auto t = linear(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(build_model(t, {}));
  state.counters["elements"] = static_cast<double>(t.network.elements.size());
}
BENCHMARK(BM_BuildLinear)->RangeMultiplier(2)->Range(4, 256)->Unit(benchmark::kMicrosecond);

void BM_BuildTree(benchmark::State& state) {
  const int hosts = static_cast<int>(state.range(0));
  const auto t = generate_topology(TopologyKind::tree_for_hosts(hosts), hosts, ControlMode::OutOfBand);
  for (auto _ : state) benchmark::DoNotOptimize(build_model(t, {}));
  state.counters["elements"] = static_cast<double>(t.network.elements.size());
}
BENCHMARK(BM_BuildTree)->RangeMultiplier(2)->Range(4, 256)->Unit(benchmark::kMicrosecond);

// Controller shutdown on a linear network, all NICs observed.
void BM_DiagnoseShutdown(benchmark::State& state) {
  const auto t = linear(static_cast<int>(state.range(0)));
  const auto g = build_model(t, TemplateProfile::degree_adaptive());
  const auto bn = attach_parameters(g, PriorConfig::defaults());
  const auto truth = inject(g, {{{"C_1", FaultMode::NodeShutdown}}, 0});
  const auto alarm = alarm_for(bn, t, truth);
  const auto obs = synthesize_observations(truth, g);
  for (auto _ : state) benchmark::DoNotOptimize(diagnose(bn, alarm, obs));
}
BENCHMARK(BM_DiagnoseShutdown)->RangeMultiplier(2)->Range(2, 32)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
