#pragma once

#include <cstdint>
#include <ostream>

#include "radixnet/nn.hpp"

namespace radixnet {

enum class PruneScope { global, per_layer };

struct PruneConfig {
  double target_sparsity = 0.99;
  PruneScope scope = PruneScope::global;
};

struct PruneResult {
  MlpModel model;
  double achieved_sparsity = 0.0;
};

// One-shot magnitude pruning: zeroes the ceil(target * total) smallest
// weights by absolute value — over all layers together (global) or with a
// per-layer budget (per_layer). Ties break deterministically by (layer, row,
// column) in ascending order. The surviving pattern becomes the new mask
// (never resurrecting an already-masked weight), so pruning at the same
// target is idempotent. Throws std::invalid_argument for targets outside
// [0, 1].
PruneResult magnitude_prune(const MlpModel& model, const PruneConfig& cfg);

struct PrunePipelineResult {
  TrainReport dense_report;
  TrainReport finetune_report;  // zero-length curves when finetune_epochs == 0
  MlpModel model;               // post-prune, post-finetune
  double achieved_sparsity = 0.0;
};

// The classic compression recipe measured in the experiments: train a dense
// model, magnitude-prune it, optionally fine-tune the survivors. The seed
// drives dense init and batch order; fine-tuning continues with its own
// derived shuffle stream.
PrunePipelineResult prune_pipeline(const Architecture& arch, const Dataset& train_data,
                                   const Dataset& val_data, int dense_epochs, int finetune_epochs,
                                   const PruneConfig& prune_cfg, const TrainConfig& base_cfg,
                                   std::uint64_t seed);

// "stage,epoch,val_acc": dense epochs first, then finetune epochs.
void write_comparison_csv(const PrunePipelineResult& result, std::ostream& out);

}  // namespace radixnet
