#include <benchmark/benchmark.h>

#include "psbm/generators.hpp"
#include "psbm/message_passing.hpp"
#include "psbm/model.hpp"
#include "psbm/recovery.hpp"
#include "psbm/tree_sim.hpp"

using namespace psbm;

namespace {

void bm_f_theta(benchmark::State& state) {
  double x = 0.37;
  for (auto _ : state) {
    x = f_theta(0.4, x + 1.0);
    benchmark::DoNotOptimize(x);
  }
}
BENCHMARK(bm_f_theta);

void bm_amp_binary_regular_tree(benchmark::State& state) {
  const TreeParams tp{1.0 / 3.0, 15.0, 0.2, 2};
  const int depth = static_cast<int>(state.range(0));
  const BroadcastTree tree = gen_regular_tree(tp, depth, Seed{17});
  for (auto _ : state) {
    benchmark::DoNotOptimize(amp_binary_messages(tree, tp));
  }
  state.SetItemsProcessed(state.iterations() * tree.size());
}
BENCHMARK(bm_amp_binary_regular_tree)->Arg(3)->Arg(4);

void bm_bp_k_regular_tree(benchmark::State& state) {
  const TreeParams tp{1.0 / 3.0, 15.0, 0.2, 3};
  const BroadcastTree tree = gen_regular_tree(tp, 3, Seed{17});
  for (auto _ : state) {
    benchmark::DoNotOptimize(bp_k(tree, tp));
  }
  state.SetItemsProcessed(state.iterations() * tree.size());
}
BENCHMARK(bm_bp_k_regular_tree);

void bm_gen_psbm(benchmark::State& state) {
  const ModelParams params{static_cast<int>(state.range(0)), 2, 0.01, 0.002, 0.1};
  std::uint64_t seed = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(gen_psbm(params, Seed{seed++}));
  }
}
BENCHMARK(bm_gen_psbm)->Arg(1000)->Arg(5000);

void bm_recover_node(benchmark::State& state) {
  const ModelParams params{5000, 2, 0.003, 0.0009, 0.1};
  const LabeledGraph graph = gen_psbm(params, Seed{5});
  RecoverConfig cfg;
  cfg.tp = tree_params_from_sbm(params);
  cfg.t_bar = static_cast<int>(state.range(0));
  int v = 0;
  for (auto _ : state) {
    while (graph.revealed[v]) v = (v + 1) % graph.n;
    benchmark::DoNotOptimize(recover_node(graph, v, cfg));
    v = (v + 1) % graph.n;
  }
}
BENCHMARK(bm_recover_node)->Arg(2)->Arg(3);

void bm_sample_amp_root(benchmark::State& state) {
  const TreeParams tp{1.0 / 3.0, 23.0, 5.0 / 23.0, 2};
  std::uint64_t seed = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_amp_root_binary(tp, 8, Seed{seed++}));
  }
}
BENCHMARK(bm_sample_amp_root);

}  // namespace

BENCHMARK_MAIN();
