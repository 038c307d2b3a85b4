#include "radixnet/nn.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>

#include "radixnet/rng.hpp"

namespace radixnet {

namespace {

Matrix mask_as_matrix(const LayerMask& mask) {
  Matrix m(mask.rows, mask.cols);
  for (int r = 0; r < mask.rows; ++r)
    for (int c = 0; c < mask.cols; ++c) m(r, c) = mask.at(r, c);
  return m;
}

int argmax_row(const Matrix& m, Eigen::Index row) {
  int best = 0;
  double best_value = m(row, 0);
  for (Eigen::Index c = 1; c < m.cols(); ++c) {
    if (m(row, c) > best_value) {  // strict: ties go to the lowest index
      best_value = m(row, c);
      best = static_cast<int>(c);
    }
  }
  return best;
}

}  // namespace

Architecture MlpModel::architecture() const {
  Architecture arch;
  if (layers.empty()) return arch;
  arch.layer_widths.push_back(static_cast<int>(layers.front().weights.rows()));
  for (const LayerParams& l : layers) arch.layer_widths.push_back(static_cast<int>(l.weights.cols()));
  return arch;
}

int MlpModel::num_classes() const {
  return layers.empty() ? 0 : static_cast<int>(layers.back().weights.cols());
}

double MlpModel::mask_sparsity() const {
  double nnz = 0.0, total = 0.0;
  for (const LayerParams& l : layers) {
    nnz += l.mask.sum();
    total += static_cast<double>(l.mask.size());
  }
  return total == 0.0 ? 0.0 : 1.0 - nnz / total;
}

MlpModel init_model(const Topology& topo, std::uint64_t seed) {
  if (topo.masks.empty()) throw NnError("cannot initialize a model from an empty topology");
  MlpModel model;
  model.radix_list = topo.radix_list;
  model.init_seed = seed;
  Rng rng(seed);
  for (const LayerMask& mask : topo.masks) {
    LayerParams layer;
    layer.mask = mask_as_matrix(mask);
    layer.weights.resize(mask.rows, mask.cols);
    const double limit = std::sqrt(6.0 / (mask.rows + mask.cols));
    for (int r = 0; r < mask.rows; ++r)
      for (int c = 0; c < mask.cols; ++c) layer.weights(r, c) = rng.uniform(-limit, limit);
    layer.weights = layer.weights.cwiseProduct(layer.mask);
    layer.bias = RowVector::Zero(mask.cols);
    model.layers.push_back(std::move(layer));
  }
  return model;
}

ForwardPass forward(const MlpModel& model, const Matrix& inputs) {
  if (model.layers.empty()) throw NnError("forward through an empty model");
  if (inputs.cols() != model.layers.front().weights.rows())
    throw NnError("forward: input width " + std::to_string(inputs.cols()) + " does not match layer 0 fan-in " +
                  std::to_string(model.layers.front().weights.rows()));
  ForwardPass fp;
  fp.activations.reserve(model.layers.size() + 1);
  fp.activations.push_back(inputs);
  for (std::size_t t = 0; t < model.layers.size(); ++t) {
    const LayerParams& layer = model.layers[t];
    Matrix z = fp.activations.back() * layer.weights.cwiseProduct(layer.mask);
    z.rowwise() += layer.bias;
    if (t + 1 < model.layers.size()) {
      fp.activations.push_back(z.cwiseMax(0.0));
    } else {
      fp.logits = z;
      fp.activations.push_back(softmax_rows(z));
    }
  }
  return fp;
}

Matrix softmax_rows(const Matrix& logits) {
  Matrix out(logits.rows(), logits.cols());
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    const double m = logits.row(r).maxCoeff();
    out.row(r) = (logits.row(r).array() - m).exp();
    out.row(r) /= out.row(r).sum();
  }
  return out;
}

double mean_cross_entropy(const Matrix& logits, const Matrix& targets) {
  if (logits.rows() != targets.rows() || logits.cols() != targets.cols())
    throw NnError("cross-entropy shape mismatch");
  double total = 0.0;
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    const double m = logits.row(r).maxCoeff();
    const double lse = m + std::log((logits.row(r).array() - m).exp().sum());
    total += lse - logits.row(r).dot(targets.row(r));
  }
  return total / static_cast<double>(logits.rows());
}

double accuracy(const Matrix& probs_or_logits, const Matrix& targets) {
  if (probs_or_logits.rows() != targets.rows()) throw NnError("accuracy shape mismatch");
  Eigen::Index correct = 0;
  for (Eigen::Index r = 0; r < probs_or_logits.rows(); ++r) {
    if (argmax_row(probs_or_logits, r) == argmax_row(targets, r)) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(probs_or_logits.rows());
}

Gradients backward(const MlpModel& model, const ForwardPass& fp, const Matrix& targets) {
  const std::size_t L = model.layers.size();
  if (fp.activations.size() != L + 1) throw NnError("backward: forward pass does not match model depth");
  const Matrix& probs = fp.activations.back();
  if (targets.rows() != probs.rows() || targets.cols() != probs.cols())
    throw NnError("backward: target shape mismatch");

  Gradients grads;
  grads.weights.resize(L);
  grads.bias.resize(L);
  const double batch = static_cast<double>(probs.rows());
  Matrix delta = (probs - targets) / batch;  // softmax and loss fused
  for (std::size_t t = L; t-- > 0;) {
    const LayerParams& layer = model.layers[t];
    grads.weights[t] = (fp.activations[t].transpose() * delta).cwiseProduct(layer.mask);
    grads.bias[t] = delta.colwise().sum();
    if (t > 0) {
      // relu gate: activation > 0 iff pre-activation > 0
      delta = (delta * layer.weights.cwiseProduct(layer.mask).transpose())
                  .cwiseProduct((fp.activations[t].array() > 0.0).cast<double>().matrix());
    }
  }
  return grads;
}

void apply_gradients(MlpModel& model, const Gradients& grads, const TrainConfig& cfg, OptimizerState& state) {
  const std::size_t L = model.layers.size();
  if (grads.weights.size() != L || grads.bias.size() != L)
    throw NnError("apply_gradients: gradient count does not match model depth");

  for (std::size_t t = 0; t < L; ++t) {
    const LayerParams& layer = model.layers[t];
    if (grads.weights[t].rows() != layer.weights.rows() || grads.weights[t].cols() != layer.weights.cols() ||
        grads.bias[t].size() != layer.bias.size())
      throw NnError("apply_gradients: shape mismatch in weight layer " + std::to_string(t));
    if (!grads.weights[t].allFinite() || !grads.bias[t].allFinite())
      throw NnError("apply_gradients: non-finite gradient in weight layer " + std::to_string(t));
  }

  if (cfg.optimizer == Optimizer::adam && state.weight_m.empty()) {
    state.weight_m.resize(L);
    state.weight_v.resize(L);
    state.bias_m.resize(L);
    state.bias_v.resize(L);
    for (std::size_t t = 0; t < L; ++t) {
      state.weight_m[t] = Matrix::Zero(model.layers[t].weights.rows(), model.layers[t].weights.cols());
      state.weight_v[t] = Matrix::Zero(model.layers[t].weights.rows(), model.layers[t].weights.cols());
      state.bias_m[t] = RowVector::Zero(model.layers[t].bias.size());
      state.bias_v[t] = RowVector::Zero(model.layers[t].bias.size());
    }
  }

  ++model.step_count;
  const double lr = cfg.learning_rate;
  if (cfg.optimizer == Optimizer::sgd) {
    for (std::size_t t = 0; t < L; ++t) {
      model.layers[t].weights -= lr * grads.weights[t];
      model.layers[t].bias -= lr * grads.bias[t];
      model.layers[t].weights = model.layers[t].weights.cwiseProduct(model.layers[t].mask);
    }
    return;
  }

  constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  const double step = static_cast<double>(model.step_count);
  const double correction1 = 1.0 - std::pow(beta1, step);
  const double correction2 = 1.0 - std::pow(beta2, step);
  for (std::size_t t = 0; t < L; ++t) {
    LayerParams& layer = model.layers[t];
    state.weight_m[t] = beta1 * state.weight_m[t] + (1.0 - beta1) * grads.weights[t];
    state.weight_v[t] = beta2 * state.weight_v[t] + (1.0 - beta2) * grads.weights[t].cwiseProduct(grads.weights[t]);
    state.bias_m[t] = beta1 * state.bias_m[t] + (1.0 - beta1) * grads.bias[t];
    state.bias_v[t] = beta2 * state.bias_v[t] + (1.0 - beta2) * grads.bias[t].cwiseProduct(grads.bias[t]);
    layer.weights.array() -= lr * (state.weight_m[t].array() / correction1) /
                             ((state.weight_v[t].array() / correction2).sqrt() + eps);
    layer.bias.array() -=
        lr * (state.bias_m[t].array() / correction1) / ((state.bias_v[t].array() / correction2).sqrt() + eps);
    layer.weights = layer.weights.cwiseProduct(layer.mask);
  }
}

EvalResult evaluate(const MlpModel& model, const Dataset& data) {
  if (data.count() == 0) throw NnError("evaluate on an empty dataset");
  const Eigen::Index chunk_rows = 2048;
  double loss_sum = 0.0;
  Eigen::Index correct = 0;
  Matrix targets_all = one_hot(data.labels, model.num_classes());
  for (Eigen::Index lo = 0; lo < data.images.rows(); lo += chunk_rows) {
    const Eigen::Index n = std::min(chunk_rows, data.images.rows() - lo);
    ForwardPass fp = forward(model, data.images.middleRows(lo, n));
    const Matrix targets = targets_all.middleRows(lo, n);
    loss_sum += mean_cross_entropy(fp.logits, targets) * static_cast<double>(n);
    correct += static_cast<Eigen::Index>(std::lround(accuracy(fp.activations.back(), targets) * static_cast<double>(n)));
  }
  return {loss_sum / static_cast<double>(data.count()),
          static_cast<double>(correct) / static_cast<double>(data.count())};
}

TrainReport train(MlpModel& model, const Dataset& train_data, const Dataset& val_data, const TrainConfig& cfg) {
  if (cfg.epochs < 1) throw NnError("train: epochs must be >= 1");
  if (cfg.batch_size < 1) throw NnError("train: batch_size must be >= 1");
  if (!(cfg.learning_rate > 0.0) || !std::isfinite(cfg.learning_rate))
    throw NnError("train: learning_rate must be positive and finite");
  if (cfg.eval_every < 1) throw NnError("train: eval_every must be >= 1");
  if (train_data.count() == 0) throw NnError("train: empty training set");

  const auto start = std::chrono::steady_clock::now();
  TrainReport report;
  report.seed = cfg.seed;
  OptimizerState state;
  BatchPlan plan{cfg.batch_size, cfg.seed};

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    BatchSequence batches(train_data, plan, epoch, model.num_classes());
    double loss_sum = 0.0, acc_sum = 0.0, samples = 0.0;
    for (int b = 0; b < batches.size(); ++b) {
      Batch batch = batches.batch(b);
      const double n = static_cast<double>(batch.inputs.rows());
      ForwardPass fp = forward(model, batch.inputs);
      const double batch_loss = mean_cross_entropy(fp.logits, batch.targets);
      if (epoch == 0 && b == 0) report.initial_batch_loss = batch_loss;
      loss_sum += batch_loss * n;
      acc_sum += accuracy(fp.activations.back(), batch.targets) * n;
      samples += n;
      Gradients grads = backward(model, fp, batch.targets);
      apply_gradients(model, grads, cfg, state);
    }
    report.train_loss.push_back(loss_sum / samples);
    report.train_acc.push_back(acc_sum / samples);

    if ((epoch + 1) % cfg.eval_every == 0 || epoch == cfg.epochs - 1) {
      EvalResult val = evaluate(model, val_data);
      report.val_loss.push_back(val.loss);
      report.val_acc.push_back(val.accuracy);
    } else {
      // placeholder, replaced by the nearest later evaluation below
      report.val_loss.push_back(std::numeric_limits<double>::quiet_NaN());
      report.val_acc.push_back(std::numeric_limits<double>::quiet_NaN());
    }
  }
  // fill skipped epochs: carry the previous evaluation forward, and the first
  // evaluation backward over any leading gap
  double last_loss = 0.0, last_acc = 0.0;
  bool have = false;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const std::size_t e = static_cast<std::size_t>(epoch);
    if (!std::isnan(report.val_acc[e])) {
      last_loss = report.val_loss[e];
      last_acc = report.val_acc[e];
      have = true;
    } else if (have) {
      report.val_loss[e] = last_loss;
      report.val_acc[e] = last_acc;
    }
  }
  // leading gap (eval_every > 1): backfill from the first real evaluation
  for (int epoch = cfg.epochs - 1; epoch >= 0; --epoch) {
    const std::size_t e = static_cast<std::size_t>(epoch);
    if (!std::isnan(report.val_acc[e])) {
      last_loss = report.val_loss[e];
      last_acc = report.val_acc[e];
    } else {
      report.val_loss[e] = last_loss;
      report.val_acc[e] = last_acc;
    }
  }

  report.final_val_acc = report.val_acc.back();
  report.sparsity = model.mask_sparsity();
  report.wall_time_sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

void write_report_csv(const TrainReport& report, std::ostream& out) {
  out << "epoch,train_loss,train_acc,val_loss,val_acc\n";
  char line[160];
  for (std::size_t e = 0; e < report.train_loss.size(); ++e) {
    std::snprintf(line, sizeof line, "%zu,%.6f,%.6f,%.6f,%.6f\n", e, report.train_loss[e],
                  report.train_acc[e], report.val_loss[e], report.val_acc[e]);
    out << line;
  }
}

}  // namespace radixnet
