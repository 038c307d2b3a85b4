#pragma once

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "radixnet/dataio.hpp"
#include "radixnet/matrix.hpp"
#include "radixnet/topology.hpp"

namespace radixnet {

class NnError : public std::runtime_error {
 public:
  explicit NnError(const std::string& what) : std::runtime_error(what) {}
};

struct LayerParams {
  Matrix weights;  // fan_in x fan_out
  RowVector bias;  // fan_out
  Matrix mask;     // 0/1 pattern, same shape as weights
};

// Multilayer perceptron with a fixed connectivity pattern: relu on hidden
// layers, softmax on the output. Weights stay exactly zero wherever the mask
// is zero, at initialization and after every optimizer step.
struct MlpModel {
  std::vector<LayerParams> layers;
  RadixList radix_list;  // construction provenance (dense baselines use all-1 radices)
  std::uint64_t init_seed = 0;
  std::int64_t step_count = 0;

  Architecture architecture() const;
  int num_classes() const;
  double mask_sparsity() const;  // zero fraction over all masks
};

// Glorot-uniform initialization on the *dense* fan shape — the limit is
// sqrt(6 / (fan_in + fan_out)) regardless of how many connections survive the
// mask — then multiplied by the mask. Biases start at zero. The seed pins
// every draw; layers consume one shared stream in order.
MlpModel init_model(const Topology& topo, std::uint64_t seed);

struct ForwardPass {
  std::vector<Matrix> activations;  // inputs first, softmax probabilities last
  Matrix logits;                    // output layer pre-softmax
};

// activations[t+1] = act(activations[t] * (W ∘ M) + bias). The mask product
// is applied explicitly so perturbing a dead weight provably has no effect.
ForwardPass forward(const MlpModel& model, const Matrix& inputs);

// Row-stabilized softmax (shift by the row max before exponentiating).
Matrix softmax_rows(const Matrix& logits);

// Mean cross-entropy straight from logits via log-sum-exp; never forms
// probabilities, so it is finite for any finite logits.
double mean_cross_entropy(const Matrix& logits, const Matrix& targets);

// Fraction of rows whose predicted class (first index of the row maximum)
// matches the one-hot target.
double accuracy(const Matrix& probs_or_logits, const Matrix& targets);

struct Gradients {
  std::vector<Matrix> weights;
  std::vector<RowVector> bias;
};

// Gradient of mean cross-entropy over the batch, softmax fused with the loss
// (output delta = (probs - targets) / batch). Weight gradients are masked.
Gradients backward(const MlpModel& model, const ForwardPass& fp, const Matrix& targets);

enum class Optimizer { adam, sgd };

struct TrainConfig {
  int epochs = 3;
  int batch_size = 100;
  double learning_rate = 1e-3;
  Optimizer optimizer = Optimizer::adam;
  std::uint64_t seed = 0;  // epoch shuffle seed
  int eval_every = 1;      // validation cadence in epochs
};

// Adam first/second moment buffers (unused for plain SGD).
struct OptimizerState {
  std::vector<Matrix> weight_m, weight_v;
  std::vector<RowVector> bias_m, bias_v;
};

// One optimizer step. Adam uses beta1 0.9, beta2 0.999, eps 1e-8 with bias
// correction; both optimizers re-multiply the weights by the mask afterwards
// so masked entries remain exactly zero. Throws NnError on shape mismatches
// or non-finite gradients (naming the offending layer).
void apply_gradients(MlpModel& model, const Gradients& grads, const TrainConfig& cfg, OptimizerState& state);

struct EvalResult {
  double loss = 0.0;
  double accuracy = 0.0;
};
EvalResult evaluate(const MlpModel& model, const Dataset& data);

struct TrainReport {
  std::vector<double> train_loss;  // per-epoch means, weighted by batch size
  std::vector<double> train_acc;
  std::vector<double> val_loss;  // evaluated every eval_every epochs; gaps
  std::vector<double> val_acc;   // carry the nearest evaluated value
  double initial_batch_loss = 0.0;
  double final_val_acc = 0.0;
  double wall_time_sec = 0.0;
  std::uint64_t seed = 0;
  double sparsity = 0.0;
};

// Full training run: shuffled batches per epoch, loss/accuracy curves, a
// validation pass every eval_every epochs (always including the last one).
// Deterministic given (model, config): identical curves on every rerun.
TrainReport train(MlpModel& model, const Dataset& train_data, const Dataset& val_data,
                  const TrainConfig& cfg);

// "epoch,train_loss,train_acc,val_loss,val_acc" with 6-decimal values.
void write_report_csv(const TrainReport& report, std::ostream& out);

// Single-file checkpoint: one JSON header line (architecture, radix list,
// seed, step count, RLE masks) followed by little-endian f64 weights and
// biases per layer. Load rejects malformed headers and truncated payloads.
void save_checkpoint(const MlpModel& model, const std::filesystem::path& path);
MlpModel load_checkpoint(const std::filesystem::path& path);

}  // namespace radixnet
