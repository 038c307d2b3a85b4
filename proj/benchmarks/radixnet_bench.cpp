// Microbenchmarks for the hot paths: topology construction, mask expansion,
// the forward/backward passes, one full optimizer step, and pruning.
// Run manually: build/benchmarks/radixnet_bench [--benchmark_filter=...]
#include <benchmark/benchmark.h>

#include "radixnet/nn.hpp"
#include "radixnet/pruning.hpp"
#include "radixnet/rng.hpp"
#include "radixnet/topology.hpp"

namespace {

using namespace radixnet;

const Architecture kLenet{{784, 300, 100, 10}};

Matrix random_batch(int rows, int cols, std::uint64_t seed) {
  Rng rng(seed);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(0.0, 1.0);
  return m;
}

Matrix random_targets(int rows, int classes, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<int> labels;
  for (int i = 0; i < rows; ++i) labels.push_back(static_cast<int>(rng.below(classes)));
  return one_hot(labels, classes);
}

void BM_build_topology(benchmark::State& state) {
  const RadixList rl = parse_radix_list("[[10,10],[10]]");
  for (auto _ : state) {
    Topology topo = build_topology(rl, kLenet);
    benchmark::DoNotOptimize(topo.sparsity);
  }
}
BENCHMARK(BM_build_topology);

void BM_mixed_radix_block(benchmark::State& state) {
  const std::vector<int> radices{10, 10};
  for (auto _ : state) {
    std::vector<LayerMask> masks = mixed_radix_block(radices);
    benchmark::DoNotOptimize(masks.front().nnz());
  }
}
BENCHMARK(BM_mixed_radix_block);

void BM_expand_mask(benchmark::State& state) {
  const LayerMask base = mixed_radix_block({10, 10}).front();
  for (auto _ : state) {
    LayerMask expanded = expand_mask(base, 784, 300);
    benchmark::DoNotOptimize(expanded.nnz());
  }
}
BENCHMARK(BM_expand_mask);

void BM_forward_batch100(benchmark::State& state) {
  const MlpModel model = init_model(build_topology(parse_radix_list("[[10,10],[10]]"), kLenet), 1);
  const Matrix inputs = random_batch(100, 784, 2);
  for (auto _ : state) {
    ForwardPass fp = forward(model, inputs);
    benchmark::DoNotOptimize(fp.logits.sum());
  }
}
BENCHMARK(BM_forward_batch100);

void BM_train_step_batch100(benchmark::State& state) {
  MlpModel model = init_model(build_topology(parse_radix_list("[[10,10],[10]]"), kLenet), 1);
  const Matrix inputs = random_batch(100, 784, 2);
  const Matrix targets = random_targets(100, 10, 3);
  TrainConfig cfg;
  OptimizerState opt;
  for (auto _ : state) {
    const ForwardPass fp = forward(model, inputs);
    const Gradients grads = backward(model, fp, targets);
    apply_gradients(model, grads, cfg, opt);
    benchmark::DoNotOptimize(model.step_count);
  }
}
BENCHMARK(BM_train_step_batch100);

void BM_magnitude_prune_dense(benchmark::State& state) {
  const MlpModel model = init_model(dense_topology(kLenet), 1);
  PruneConfig cfg;
  cfg.target_sparsity = 0.99;
  for (auto _ : state) {
    PruneResult result = magnitude_prune(model, cfg);
    benchmark::DoNotOptimize(result.achieved_sparsity);
  }
}
BENCHMARK(BM_magnitude_prune_dense);

void BM_reachability(benchmark::State& state) {
  const Topology topo = build_topology(parse_radix_list("[[10,10],[10]]"), kLenet);
  for (auto _ : state) {
    LayerMask reach = reachability(topo);
    benchmark::DoNotOptimize(reach.nnz());
  }
}
BENCHMARK(BM_reachability);

}  // namespace

BENCHMARK_MAIN();
