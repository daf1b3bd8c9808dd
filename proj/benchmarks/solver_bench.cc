#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "mecplan/bwalloc.h"
#include "mecplan/generator.h"
#include "mecplan/linkgraph.h"
#include "mecplan/milp.h"

namespace {

using namespace mecplan;

GeneratorConfig SmallScenario(std::uint64_t seed, int interfaces) {
  GeneratorConfig c;
  c.seed = seed;
  c.num_bs = 4;
  c.interfaces = interfaces;
  c.num_tasks = 4;
  c.servers = {{0, 1.2 * kBytesPerGigabyte}, {2, 1.0 * kBytesPerGigabyte}};
  c.area_width_m = c.area_height_m = 180.0;
  return c;
}

void BM_LinkClosedForm(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> draw(1e-3, 5.0);
  std::vector<double> w(state.range(0));
  for (double& v : w) v = draw(rng);
  for (auto _ : state) benchmark::DoNotOptimize(SolveLinkClosedForm(w, 0.95));
}
BENCHMARK(BM_LinkClosedForm)->Arg(2)->Arg(20)->Arg(200);

void BM_LinkBisection(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> draw(1e-3, 5.0);
  std::vector<double> w(state.range(0));
  for (double& v : w) v = draw(rng);
  for (auto _ : state) benchmark::DoNotOptimize(SolveLinkBisection(w, 0.95));
}
BENCHMARK(BM_LinkBisection)->Arg(2)->Arg(20)->Arg(200);

// Step-1 solve on a small scenario; the allocation benchmarks reuse its plan.
struct Solved {
  Instance inst;
  LinkGraph graph;
  Plan plan;
};

const Solved& SmallSolved() {
  static const Solved s = [] {
    Instance inst = GenerateInstance(SmallScenario(4, 2));
    LinkGraph graph = BuildInstanceGraph(inst);
    Plan plan = *SolveP1(BuildP1(inst, graph)).plan;
    return Solved{std::move(inst), std::move(graph), std::move(plan)};
  }();
  return s;
}

void BM_AllocateP2A(benchmark::State& state) {
  const Solved& s = SmallSolved();
  for (auto _ : state) benchmark::DoNotOptimize(AllocateP2A(s.plan, s.inst, s.graph));
}
BENCHMARK(BM_AllocateP2A);

void BM_AllocateP2B(benchmark::State& state) {
  const Solved& s = SmallSolved();
  for (auto _ : state) benchmark::DoNotOptimize(AllocateP2B(s.plan, s.inst, s.graph));
}
BENCHMARK(BM_AllocateP2B);

void BM_RootRelaxation(benchmark::State& state) {
  const Instance inst = GenerateInstance(SmallScenario(4, static_cast<int>(state.range(0))));
  const MilpModel model = BuildP1(inst, BuildInstanceGraph(inst));
  for (auto _ : state) benchmark::DoNotOptimize(SolveLpRelaxation(model, {}));
}
BENCHMARK(BM_RootRelaxation)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_SolveP1(benchmark::State& state) {
  const Instance inst = GenerateInstance(SmallScenario(4, static_cast<int>(state.range(0))));
  const MilpModel model = BuildP1(inst, BuildInstanceGraph(inst));
  for (auto _ : state) benchmark::DoNotOptimize(SolveP1(model));
}
BENCHMARK(BM_SolveP1)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
