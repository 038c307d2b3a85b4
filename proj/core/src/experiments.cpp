#include "radixnet/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <thread>

namespace radixnet {

namespace {

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

void check_directory_component(const std::string& name) {
  if (name.empty() || name == "." || name == "..")
    throw std::invalid_argument("experiment name must be a usable directory name");
  if (name.find('/') != std::string::npos || name.find('\\') != std::string::npos)
    throw std::invalid_argument("experiment name must not contain path separators");
}

int max_radix(const RadixList& rl) {
  int best = 0;
  for (const auto& block : rl.blocks)
    for (int radix : block) best = std::max(best, radix);
  return best;
}

}  // namespace

SweepResult sweep(const ExperimentSpec& spec, const Dataset& train_data, const Dataset& val_data) {
  check_directory_component(spec.name);
  if (spec.topologies.empty()) throw std::invalid_argument("sweep needs at least one topology");
  if (spec.seeds.empty()) throw std::invalid_argument("sweep needs at least one seed");
  if (spec.parallelism < 1) throw std::invalid_argument("parallelism must be at least 1");

  const std::size_t n_seeds = spec.seeds.size();
  const std::size_t n_runs = spec.topologies.size() * n_seeds;
  SweepResult result;
  result.records.resize(n_runs);

  // Directories are created up front, single-threaded; the workers then only
  // ever touch their own run's files.
  const bool has_output = !spec.output_dir.empty();
  std::filesystem::path exp_dir;
  std::vector<std::filesystem::path> run_dirs(has_output ? n_runs : 0);
  if (has_output) {
    exp_dir = std::filesystem::path(spec.output_dir) / spec.name;
    for (std::size_t i = 0; i < n_runs; ++i) {
      const RadixList& rl = spec.topologies[i / n_seeds];
      run_dirs[i] = exp_dir / radix_list_slug(rl) / ("seed" + std::to_string(spec.seeds[i % n_seeds]));
      std::filesystem::create_directories(run_dirs[i]);
    }
  }

  auto run_one = [&](std::size_t idx) {
    SweepRecord& rec = result.records[idx];
    rec.radix_list = spec.topologies[idx / n_seeds];
    rec.seed = spec.seeds[idx % n_seeds];
    rec.epochs = spec.train_config.epochs;
    try {
      Topology topo = build_topology(rec.radix_list, spec.architecture);
      rec.sparsity = topo.sparsity;
      MlpModel model = init_model(topo, rec.seed);
      TrainConfig cfg = spec.train_config;
      cfg.seed = rec.seed;
      TrainReport report = train(model, train_data, val_data, cfg);
      rec.final_train_acc = report.train_acc.back();
      rec.final_val_acc = report.final_val_acc;
      if (has_output) {
        const std::filesystem::path csv_path = run_dirs[idx] / "report.csv";
        std::ofstream csv(csv_path);
        if (!csv) throw NnError("cannot write " + csv_path.string());
        write_report_csv(report, csv);
        save_checkpoint(model, run_dirs[idx] / "model.ckpt");
        rec.curve_path = csv_path.string();
      }
    } catch (const std::exception& e) {
      rec.failed = true;
      rec.error = e.what();
    }
  };

  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(spec.parallelism), n_runs);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n_runs; ++i) run_one(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (;;) {
          const std::size_t i = next.fetch_add(1);
          if (i >= n_runs) return;
          run_one(i);
        }
      });
    for (std::thread& t : pool) t.join();
  }

  for (const SweepRecord& rec : result.records)
    if (rec.failed) ++result.failure_count;

  if (has_output) {
    const std::filesystem::path summary_path = exp_dir / "summary.csv";
    std::ofstream out(summary_path);
    if (!out) throw NnError("cannot write " + summary_path.string());
    write_summary_csv(result.records, out);
  }
  return result;
}

void write_summary_csv(const std::vector<SweepRecord>& records, std::ostream& out) {
  out << "radix_list,sparsity,seed,final_train_acc,final_val_acc,status\n";
  for (const SweepRecord& rec : records) {
    out << '"' << format_radix_list(rec.radix_list) << "\",";
    if (rec.failed)
      out << ',' << rec.seed << ",,,failed\n";
    else
      out << fmt6(rec.sparsity) << ',' << rec.seed << ',' << fmt6(rec.final_train_acc) << ','
          << fmt6(rec.final_val_acc) << ",ok\n";
  }
}

std::vector<SeedRangeRow> seed_range_study(const SeedRangeConfig& cfg, const Dataset& train_data,
                                           const Dataset& val_data) {
  if (cfg.seeds.size() < 3) throw std::invalid_argument("seed range study needs at least 3 seeds");
  if (cfg.topologies_per_decile < 1)
    throw std::invalid_argument("topologies_per_decile must be at least 1");

  const std::vector<RadixList> pool = enumerate_radix_lists(cfg.enumeration);
  const auto by_decile = sample_by_sparsity(pool, cfg.architecture, cfg.topologies_per_decile, cfg.sample_seed);

  ExperimentSpec spec;
  spec.name = "seed_range";
  for (const auto& [decile, group] : by_decile)
    spec.topologies.insert(spec.topologies.end(), group.begin(), group.end());
  spec.architecture = cfg.architecture;
  spec.seeds = cfg.seeds;
  spec.train_config = cfg.train_config;
  spec.parallelism = cfg.parallelism;

  const SweepResult swept = sweep(spec, train_data, val_data);
  for (const SweepRecord& rec : swept.records)
    if (rec.failed)
      throw NnError("seed range run failed for " + format_radix_list(rec.radix_list) + " seed " +
                    std::to_string(rec.seed) + ": " + rec.error);

  const std::size_t n_seeds = cfg.seeds.size();
  std::vector<SeedRangeRow> rows;
  for (std::size_t t = 0; t < spec.topologies.size(); ++t) {
    std::vector<double> finals;
    for (std::size_t s = 0; s < n_seeds; ++s)
      finals.push_back(swept.records[t * n_seeds + s].final_val_acc);
    std::sort(finals.begin(), finals.end());
    SeedRangeRow row;
    row.radix_list = spec.topologies[t];
    row.sparsity = swept.records[t * n_seeds].sparsity;
    row.min_val_acc = finals.front();
    row.max_val_acc = finals.back();
    const std::size_t mid = finals.size() / 2;
    row.median_val_acc =
        finals.size() % 2 ? finals[mid] : (finals[mid - 1] + finals[mid]) / 2.0;
    rows.push_back(row);
  }
  return rows;
}

void write_seed_range_csv(const std::vector<SeedRangeRow>& rows, std::ostream& out) {
  out << "radix_list,sparsity,min_val_acc,median_val_acc,max_val_acc\n";
  for (const SeedRangeRow& row : rows)
    out << '"' << format_radix_list(row.radix_list) << "\"," << fmt6(row.sparsity) << ','
        << fmt6(row.min_val_acc) << ',' << fmt6(row.median_val_acc) << ',' << fmt6(row.max_val_acc)
        << '\n';
}

std::vector<StrangeVerdict> detect_strange(const std::vector<SweepRecord>& records, double threshold,
                                           int epochs_required, double gap) {
  for (const SweepRecord& rec : records) {
    if (rec.failed)
      throw std::invalid_argument("cannot classify failed run for " + format_radix_list(rec.radix_list));
    if (rec.epochs < epochs_required)
      throw std::invalid_argument("record for " + format_radix_list(rec.radix_list) + " trained " +
                                  std::to_string(rec.epochs) + " epochs, need " +
                                  std::to_string(epochs_required));
  }

  std::vector<double> strange_finals;
  for (const SweepRecord& rec : records)
    if (rec.final_val_acc < threshold) strange_finals.push_back(rec.final_val_acc);
  std::sort(strange_finals.begin(), strange_finals.end());

  // Single-linkage on the accuracy line: a new band starts wherever the jump
  // to the next sorted value exceeds the gap.
  std::vector<AccuracyBand> bands;
  for (double v : strange_finals) {
    if (bands.empty() || v - bands.back().hi > gap)
      bands.push_back({v, v});
    else
      bands.back().hi = v;
  }

  std::vector<StrangeVerdict> verdicts;
  verdicts.reserve(records.size());
  for (const SweepRecord& rec : records) {
    StrangeVerdict verdict;
    verdict.radix_list = rec.radix_list;
    verdict.seed = rec.seed;
    verdict.final_val_acc = rec.final_val_acc;
    verdict.is_strange = rec.final_val_acc < threshold;
    if (verdict.is_strange) {
      const auto band = std::find_if(bands.begin(), bands.end(), [&](const AccuracyBand& b) {
        return b.lo <= rec.final_val_acc && rec.final_val_acc <= b.hi;
      });
      verdict.plateau_group = *band;
    }
    verdicts.push_back(std::move(verdict));
  }
  return verdicts;
}

void write_verdict_csv(const std::vector<StrangeVerdict>& verdicts, std::ostream& out) {
  out << "radix_list,seed,final_val_acc,strange,band_lo,band_hi\n";
  for (const StrangeVerdict& v : verdicts) {
    out << '"' << format_radix_list(v.radix_list) << "\"," << v.seed << ',' << fmt6(v.final_val_acc)
        << ',' << (v.is_strange ? 1 : 0) << ',';
    if (v.plateau_group)
      out << fmt6(v.plateau_group->lo) << ',' << fmt6(v.plateau_group->hi);
    else
      out << ',';
    out << '\n';
  }
}

CensusResult strange_census(const CensusConfig& cfg, const Dataset& train_data,
                            const Dataset& val_data) {
  if (cfg.min_sparsity < 0.0 || cfg.min_sparsity > 1.0)
    throw std::invalid_argument("min_sparsity must lie in [0, 1]");
  if (cfg.enumeration.num_weight_layers != cfg.architecture.num_weight_layers())
    throw std::invalid_argument("enumeration layer count does not match the architecture");

  CensusResult out;
  const std::vector<RadixList> pool = enumerate_radix_lists(cfg.enumeration);
  out.enumerated = static_cast<long long>(pool.size());

  ExperimentSpec spec;
  spec.name = "census";
  for (const RadixList& rl : pool)
    if (build_topology(rl, cfg.architecture).sparsity >= cfg.min_sparsity)
      spec.topologies.push_back(rl);
  out.trained = static_cast<long long>(spec.topologies.size());
  if (spec.topologies.empty()) return out;

  spec.architecture = cfg.architecture;
  spec.seeds = {cfg.seed};
  spec.train_config = cfg.train_config;
  spec.output_dir = cfg.output_dir;
  spec.parallelism = cfg.parallelism;

  SweepResult swept = sweep(spec, train_data, val_data);
  out.records = std::move(swept.records);
  out.failed_count = swept.failure_count;

  std::vector<SweepRecord> classifiable;
  for (const SweepRecord& rec : out.records)
    if (!rec.failed) classifiable.push_back(rec);
  out.verdicts = detect_strange(classifiable, cfg.threshold, cfg.train_config.epochs, cfg.gap);

  out.every_strange_has_radix_at_least_10 = true;
  for (const StrangeVerdict& v : out.verdicts) {
    if (!v.is_strange) continue;
    ++out.strange_count;
    const int top = max_radix(v.radix_list);
    ++out.strange_max_radix_counts[top];
    if (top < 10) out.every_strange_has_radix_at_least_10 = false;
  }
  return out;
}

SaliencyMap saliency(const MlpModel& model, SaliencySource source) {
  if (model.layers.empty() || model.layers.front().weights.rows() != 784)
    throw NnError("saliency needs a 784-input first layer");
  const LayerParams& first = model.layers.front();
  const Eigen::VectorXd per_pixel = first.weights.cwiseProduct(first.mask).cwiseAbs().rowwise().sum();

  SaliencyMap map;
  map.source = source;
  map.values.resize(28, 28);
  for (int r = 0; r < 28; ++r)
    for (int c = 0; c < 28; ++c) map.values(r, c) = per_pixel(r * 28 + c);
  const double peak = map.values.maxCoeff();
  if (peak > 0.0) map.values /= peak;
  return map;
}

namespace {

// Sums over the outer frame and the interior; width counted in pixels.
void frame_sums(const SaliencyMap& map, int width, double& border_sum, long long& border_n,
                double& interior_sum, long long& interior_n) {
  if (map.values.rows() != 28 || map.values.cols() != 28)
    throw std::invalid_argument("saliency map must be 28x28");
  if (width < 1 || width > 13) throw std::invalid_argument("frame width must lie in [1, 13]");
  border_sum = interior_sum = 0.0;
  border_n = interior_n = 0;
  for (int r = 0; r < 28; ++r)
    for (int c = 0; c < 28; ++c) {
      const bool on_border = r < width || r >= 28 - width || c < width || c >= 28 - width;
      (on_border ? border_sum : interior_sum) += map.values(r, c);
      ++(on_border ? border_n : interior_n);
    }
}

}  // namespace

double saliency_border_mean(const SaliencyMap& map, int width) {
  double border, interior;
  long long bn, in;
  frame_sums(map, width, border, bn, interior, in);
  return border / static_cast<double>(bn);
}

double saliency_interior_mean(const SaliencyMap& map, int width) {
  double border, interior;
  long long bn, in;
  frame_sums(map, width, border, bn, interior, in);
  return interior / static_cast<double>(in);
}

double coefficient_of_variation(const SaliencyMap& map) {
  const double n = static_cast<double>(map.values.size());
  const double mean = map.values.sum() / n;
  if (mean == 0.0) return 0.0;
  const double var = (map.values.array() - mean).square().sum() / n;
  return std::sqrt(var) / mean;
}

}  // namespace radixnet
