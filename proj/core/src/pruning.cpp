#include "radixnet/pruning.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "radixnet/rng.hpp"

namespace radixnet {

namespace {

struct Entry {
  double magnitude;
  std::uint32_t layer;
  std::uint32_t row;
  std::uint32_t col;
};

// Zeroes the k smallest entries (weight and mask) among the given candidates.
// stable_sort on magnitude alone: candidates arrive in (layer, row, col)
// order, which is exactly the tie-break rule.
void prune_entries(MlpModel& model, std::vector<Entry>& entries, long long k) {
  std::stable_sort(entries.begin(), entries.end(),
                   [](const Entry& a, const Entry& b) { return a.magnitude < b.magnitude; });
  for (long long i = 0; i < k; ++i) {
    const Entry& e = entries[static_cast<std::size_t>(i)];
    model.layers[e.layer].weights(e.row, e.col) = 0.0;
    model.layers[e.layer].mask(e.row, e.col) = 0.0;
  }
}

std::vector<Entry> collect_layer(const MlpModel& model, std::uint32_t t) {
  const Matrix& w = model.layers[t].weights;
  std::vector<Entry> entries;
  entries.reserve(static_cast<std::size_t>(w.size()));
  for (std::uint32_t r = 0; r < static_cast<std::uint32_t>(w.rows()); ++r)
    for (std::uint32_t c = 0; c < static_cast<std::uint32_t>(w.cols()); ++c)
      entries.push_back({std::abs(w(r, c)), t, r, c});
  return entries;
}

long long prune_budget(double target, long long total) {
  return static_cast<long long>(std::ceil(target * static_cast<double>(total)));
}

}  // namespace

PruneResult magnitude_prune(const MlpModel& model, const PruneConfig& cfg) {
  if (!(cfg.target_sparsity >= 0.0 && cfg.target_sparsity <= 1.0))
    throw std::invalid_argument("prune: target sparsity must be in [0, 1]");
  if (model.layers.empty()) throw std::invalid_argument("prune: empty model");

  PruneResult result;
  result.model = model;

  if (cfg.scope == PruneScope::global) {
    std::vector<Entry> entries;
    for (std::uint32_t t = 0; t < model.layers.size(); ++t) {
      std::vector<Entry> layer = collect_layer(model, t);
      entries.insert(entries.end(), layer.begin(), layer.end());
    }
    prune_entries(result.model, entries, prune_budget(cfg.target_sparsity, static_cast<long long>(entries.size())));
  } else {
    for (std::uint32_t t = 0; t < model.layers.size(); ++t) {
      std::vector<Entry> entries = collect_layer(model, t);
      prune_entries(result.model, entries, prune_budget(cfg.target_sparsity, static_cast<long long>(entries.size())));
    }
  }
  result.achieved_sparsity = result.model.mask_sparsity();
  return result;
}

PrunePipelineResult prune_pipeline(const Architecture& arch, const Dataset& train_data,
                                   const Dataset& val_data, int dense_epochs, int finetune_epochs,
                                   const PruneConfig& prune_cfg, const TrainConfig& base_cfg,
                                   std::uint64_t seed) {
  if (dense_epochs < 1) throw std::invalid_argument("prune_pipeline: dense_epochs must be >= 1");
  if (finetune_epochs < 0) throw std::invalid_argument("prune_pipeline: finetune_epochs must be >= 0");

  PrunePipelineResult result;
  MlpModel model = init_model(dense_topology(arch), seed);

  TrainConfig dense_cfg = base_cfg;
  dense_cfg.epochs = dense_epochs;
  dense_cfg.seed = seed;
  result.dense_report = train(model, train_data, val_data, dense_cfg);

  PruneResult pruned = magnitude_prune(model, prune_cfg);
  result.achieved_sparsity = pruned.achieved_sparsity;
  result.model = std::move(pruned.model);

  if (finetune_epochs > 0) {
    TrainConfig finetune_cfg = base_cfg;
    finetune_cfg.epochs = finetune_epochs;
    finetune_cfg.seed = mix_seed(seed, 1);  // fresh shuffle stream for stage two
    result.finetune_report = train(result.model, train_data, val_data, finetune_cfg);
  }
  return result;
}

void write_comparison_csv(const PrunePipelineResult& result, std::ostream& out) {
  out << "stage,epoch,val_acc\n";
  char line[96];
  for (std::size_t e = 0; e < result.dense_report.val_acc.size(); ++e) {
    std::snprintf(line, sizeof line, "dense,%zu,%.6f\n", e, result.dense_report.val_acc[e]);
    out << line;
  }
  for (std::size_t e = 0; e < result.finetune_report.val_acc.size(); ++e) {
    std::snprintf(line, sizeof line, "finetune,%zu,%.6f\n", e, result.finetune_report.val_acc[e]);
    out << line;
  }
}

}  // namespace radixnet
