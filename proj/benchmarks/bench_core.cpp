#include <benchmark/benchmark.h>

#include "bngnn/experiments/synthetic.hpp"
#include "bngnn/gnn/model.hpp"
#include "bngnn/policy/qnetwork.hpp"

using namespace bngnn;

namespace {

std::vector<WeightedGraph> graphs(std::size_t n) {
  SyntheticSpec spec;
  spec.m = 20;
  spec.n = n;
  return generate_synthetic(spec).graphs;
}

void BM_BuildGraph(benchmark::State& state) {
  const auto g = graphs(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(build_graph(g[0], 10));
}
BENCHMARK(BM_BuildGraph)->Arg(30)->Arg(90)->Arg(200);

void BM_GnnForward(benchmark::State& state) {
  const auto g = build_graph(graphs(90)[0], 10);
  GnnConfig c;
  c.kind = state.range(1) ? GnnKind::Gat : GnnKind::Gcn;
  c.input_dim = 90;
  GnnModel m(c);
  const auto depth = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    Tape t(false);
    benchmark::DoNotOptimize(m.logits(t, g, depth).value());
  }
}
BENCHMARK(BM_GnnForward)->ArgsProduct({{1, 2, 3}, {0, 1}});

void BM_GnnTrainStep(benchmark::State& state) {
  const auto g = build_graph(graphs(90)[0], 10);
  GnnConfig c;
  c.input_dim = 90;
  GnnModel m(c);
  for (auto _ : state) {
    Tape t;
    Var loss = m.loss(t, g, 3);
    t.backward(loss);
    benchmark::DoNotOptimize(m.layer(1).transform.grad);
  }
}
BENCHMARK(BM_GnnTrainStep);

void BM_QNetworkBatch(benchmark::State& state) {
  QNetworkConfig c;
  c.input_dim = 90 * 90;
  QNetwork q(c);
  Matrix states(32, c.input_dim, 0.01);
  for (auto _ : state) benchmark::DoNotOptimize(q.q_values(states));
}
BENCHMARK(BM_QNetworkBatch);

}  // namespace

BENCHMARK_MAIN();
