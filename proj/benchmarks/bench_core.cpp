#include <benchmark/benchmark.h>

#include "swarmsgd/engine.hpp"
#include "swarmsgd/metrics.hpp"
#include "swarmsgd/objective.hpp"
#include "swarmsgd/topology.hpp"

using namespace swarmsgd;

namespace {

ObjectiveSpec ridge_of(int d) { return ObjectiveSpec::ridge(0.1, Vector::LinSpaced(d, 0.0, 1.0)); }

void BM_SampleGradient(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const ObjectiveSpec spec = ridge_of(d);
  const Vector x = Vector::Zero(d);
  Vector g(d);
  Rng rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(sample_gradient_into(spec, x, 0.02, rng, g));
}
BENCHMARK(BM_SampleGradient)->Arg(20)->Arg(100);

void BM_SwarmUpdate(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  const int d = 20;
  const Graph graph = complete_graph(N);
  Positions x = Positions::Random(N, d);
  const Vector g = Vector::Ones(d);
  int i = 0;
  for (auto _ : state) {
    swarm_update(x, i, g, graph, 0.01, 1.0);
    i = (i + 1) % N;
    benchmark::ClobberMemory();
  }
}
BENCHMARK(BM_SwarmUpdate)->Arg(20)->Arg(100);

void BM_RunSwarm(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  const int d = 20;
  const ObjectiveSpec spec = ridge_of(d);
  Rng rng(2);
  const Graph graph = erdos_renyi_connected(N, std::min(1.0, 10.0 / N), rng).graph;
  RunConfig rc;
  rc.n_threads = N;
  rc.max_updates = 10000;
  rc.record_every = 1000;
  const Positions init = Positions::Zero(N, d);
  for (auto _ : state) benchmark::DoNotOptimize(run_swarm(rc, graph, spec, init).summary.final.U);
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(*rc.max_updates));
}
BENCHMARK(BM_RunSwarm)->Arg(20)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_AlgebraicConnectivity(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  Rng rng(3);
  const Graph graph = erdos_renyi_connected(N, std::min(1.0, 10.0 / N), rng).graph;
  for (auto _ : state) benchmark::DoNotOptimize(algebraic_connectivity(graph));
}
BENCHMARK(BM_AlgebraicConnectivity)->Arg(20)->Arg(100);

void BM_Lemma4Check(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  const ObjectiveSpec spec = ridge_of(20);
  const Graph graph = complete_graph(N);
  const Positions x = Positions::Random(N, 20);
  for (auto _ : state) benchmark::DoNotOptimize(lemma4_check(x, graph, spec, 1.0).lhs);
}
BENCHMARK(BM_Lemma4Check)->Arg(20)->Arg(100);

}  // namespace

BENCHMARK_MAIN();
