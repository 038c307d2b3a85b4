#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "radixnet/matrix.hpp"

namespace radixnet {

class IdxError : public std::runtime_error {
 public:
  enum class Kind { io, bad_magic, truncated, count_mismatch, bad_label };

  IdxError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct Dataset {
  Matrix images;            // one sample per row, pixels scaled to [0, 1]
  std::vector<int> labels;  // class ids 0..9
  std::string split_name;

  int count() const { return static_cast<int>(images.rows()); }
  int feature_dim() const { return static_cast<int>(images.cols()); }
};

// Reads one images/labels pair of IDX files. Either file may be raw or
// gzip-compressed (sniffed from the 1f 8b prefix, any file name). Validation
// failures carry a Kind: unreadable file (io), wrong magic number (bad_magic),
// payload shorter/longer than the header promises (truncated), image/label
// counts that disagree (count_mismatch), labels outside 0..9 (bad_label).
Dataset load_idx(const std::filesystem::path& images_path, const std::filesystem::path& labels_path,
                 const std::string& split_name = "");

// Loads "train" or "test" from a directory holding the canonical MNIST file
// names (train-images-idx3-ubyte, t10k-images-idx3-ubyte, ...), each possibly
// with a .gz suffix.
Dataset load_mnist_split(const std::filesystem::path& dir, const std::string& split);

// $RADIXNET_DATA_DIR if set, else "./data".
std::filesystem::path default_data_dir();

struct BatchPlan {
  int batch_size = 100;
  std::uint64_t seed = 0;
};

// Shuffle order for one epoch; derived from (seed, epoch) so every epoch has
// its own reproducible order.
std::vector<int> epoch_permutation(int n, const BatchPlan& plan, int epoch);

struct Batch {
  Matrix inputs;   // batch_size x feature_dim
  Matrix targets;  // batch_size x num_classes, one-hot rows
};

// Orders a dataset for one epoch and serves it in batches. Batches are
// materialized one at a time (the epoch is never duplicated in memory); a
// short trailing batch is included when batch_size does not divide the
// sample count.
class BatchSequence {
 public:
  BatchSequence(const Dataset& data, const BatchPlan& plan, int epoch, int num_classes = 10);

  int size() const;          // number of batches
  Batch batch(int b) const;  // b in [0, size())
  const std::vector<int>& permutation() const { return perm_; }

 private:
  const Dataset* data_;
  std::vector<int> perm_;
  int batch_size_;
  int num_classes_;
};

// One-hot rows; throws IdxError(bad_label) on out-of-range labels.
Matrix one_hot(const std::vector<int>& labels, int num_classes);

}  // namespace radixnet
