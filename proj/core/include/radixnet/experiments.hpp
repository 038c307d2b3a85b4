#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "radixnet/dataio.hpp"
#include "radixnet/enumeration.hpp"
#include "radixnet/matrix.hpp"
#include "radixnet/nn.hpp"
#include "radixnet/topology.hpp"

namespace radixnet {

// A grid of (topology, seed) training runs sharing one architecture and one
// training configuration.
struct ExperimentSpec {
  std::string name;  // directory component under output_dir
  std::vector<RadixList> topologies;
  Architecture architecture;
  std::vector<std::uint64_t> seeds;
  TrainConfig train_config;  // the per-run seed overrides its seed field
  std::string output_dir;    // empty = keep results in memory only
  int parallelism = 1;
};

struct SweepRecord {
  RadixList radix_list;
  double sparsity = 0.0;
  std::uint64_t seed = 0;
  double final_train_acc = 0.0;
  double final_val_acc = 0.0;
  int epochs = 0;
  std::string curve_path;  // per-run report.csv, empty when nothing was written
  bool failed = false;
  std::string error;  // what() of the per-run failure
};

struct SweepResult {
  std::vector<SweepRecord> records;  // topology-major, then seed order
  int failure_count = 0;
};

// Trains every (topology, seed) pair independently: each run builds and
// initializes its own model from its own seed, so the records are a pure
// function of the spec — identical for any worker count. A per-run failure is
// captured in its record instead of aborting the sweep. With a non-empty
// output_dir each run writes
//   <output_dir>/<name>/<radix-list-slug>/seed<k>/{report.csv, model.ckpt}
// and the sweep finishes with <output_dir>/<name>/summary.csv.
SweepResult sweep(const ExperimentSpec& spec, const Dataset& train_data, const Dataset& val_data);

// "radix_list,sparsity,seed,final_train_acc,final_val_acc,status" rows in
// record order. Failed runs print empty numeric fields and status "failed".
void write_summary_csv(const std::vector<SweepRecord>& records, std::ostream& out);

struct SeedRangeConfig {
  EnumerationConfig enumeration;  // candidate pool to sample topologies from
  int topologies_per_decile = 1;
  std::uint64_t sample_seed = 0;
  Architecture architecture;
  std::vector<std::uint64_t> seeds;  // at least 3
  TrainConfig train_config;
  int parallelism = 1;
};

struct SeedRangeRow {
  RadixList radix_list;
  double sparsity = 0.0;
  double min_val_acc = 0.0;
  double median_val_acc = 0.0;
  double max_val_acc = 0.0;
};

// Samples topologies per sparsity decile, trains each across every seed, and
// reduces the final validation accuracies to (min, median, max). The median
// is the middle order statistic, averaging the two middles for even seed
// counts. Any per-run failure is rethrown.
std::vector<SeedRangeRow> seed_range_study(const SeedRangeConfig& cfg, const Dataset& train_data,
                                           const Dataset& val_data);

// "radix_list,sparsity,min_val_acc,median_val_acc,max_val_acc" rows.
void write_seed_range_csv(const std::vector<SeedRangeRow>& rows, std::ostream& out);

// Closed accuracy interval covering one cluster of strange-model finals.
struct AccuracyBand {
  double lo = 0.0;
  double hi = 0.0;

  bool operator==(const AccuracyBand&) const = default;
};

struct StrangeVerdict {
  RadixList radix_list;
  std::uint64_t seed = 0;
  bool is_strange = false;
  double final_val_acc = 0.0;
  std::optional<AccuracyBand> plateau_group;  // set only for strange records
};

// A record is strange exactly when its final validation accuracy falls below
// the threshold. Strange finals are then grouped by single-linkage clustering
// on the accuracy line — sorted values split wherever consecutive finals
// differ by more than `gap` — and each strange verdict carries its cluster's
// [min, max] band. Verdicts keep record order. Throws std::invalid_argument
// on failed records or on records trained for fewer than epochs_required
// epochs.
std::vector<StrangeVerdict> detect_strange(const std::vector<SweepRecord>& records,
                                           double threshold = 0.85, int epochs_required = 3,
                                           double gap = 0.03);

// "radix_list,seed,final_val_acc,strange,band_lo,band_hi" rows; the band
// fields are empty for normal records.
void write_verdict_csv(const std::vector<StrangeVerdict>& verdicts, std::ostream& out);

struct CensusConfig {
  EnumerationConfig enumeration;  // candidate pool; layer count must match
  double min_sparsity = 0.90;
  Architecture architecture;
  TrainConfig train_config;
  std::uint64_t seed = 1000;  // every model trains once with this seed
  double threshold = 0.85;
  double gap = 0.03;
  std::string output_dir;  // empty = no files
  int parallelism = 1;
};

struct CensusResult {
  long long enumerated = 0;  // candidates produced by the enumeration config
  long long trained = 0;     // candidates at or above min_sparsity
  std::vector<SweepRecord> records;      // one per trained model
  std::vector<StrangeVerdict> verdicts;  // classification of the non-failed records
  long long strange_count = 0;
  long long failed_count = 0;
  // Radix-composition observations over the strange set (recorded, never
  // asserted): whether every strange list contains some radix >= 10, and a
  // histogram of each strange list's largest radix.
  bool every_strange_has_radix_at_least_10 = false;
  std::map<int, long long> strange_max_radix_counts;
};

// Enumerates candidate radix lists, keeps those whose topology sparsity is at
// least min_sparsity, trains each once, and classifies the outcomes.
CensusResult strange_census(const CensusConfig& cfg, const Dataset& train_data,
                            const Dataset& val_data);

enum class SaliencySource { radixnet, pruned };

struct SaliencyMap {
  Matrix values;  // 28 x 28, max-normalized unless all-zero
  SaliencySource source = SaliencySource::radixnet;
};

// Aggregates each input pixel's outgoing connection strength in the first
// layer: value[p] = sum over surviving connections of |weight|, reshaped
// row-major to 28x28 and scaled so the maximum is 1 (an all-zero aggregate is
// left at zero). Throws NnError unless the first layer takes 784 inputs.
SaliencyMap saliency(const MlpModel& model, SaliencySource source = SaliencySource::radixnet);

// Mean saliency over the outermost width-pixel frame, and over everything
// inside that frame. Throws std::invalid_argument unless 1 <= width <= 13.
double saliency_border_mean(const SaliencyMap& map, int width = 2);
double saliency_interior_mean(const SaliencyMap& map, int width = 2);

// Population standard deviation divided by mean over all pixels; an all-zero
// map yields 0.
double coefficient_of_variation(const SaliencyMap& map);

}  // namespace radixnet
