#include "radixnet/enumeration.hpp"

#include <algorithm>
#include <iomanip>
#include <set>
#include <stdexcept>

#include "radixnet/rng.hpp"

namespace radixnet {

namespace {

// Appends every factor tuple of the given length (product capped) to the
// current block, recursing into the next block when the tuple is full.
void fill_block(const EnumerationConfig& cfg, int block_len, long long product, RadixList& current,
                int layers_left, std::vector<RadixList>& out);

// Chooses the next block's length and recurses until the layer budget is spent.
void fill_blocks(const EnumerationConfig& cfg, RadixList& current, int layers_left,
                 std::vector<RadixList>& out) {
  if (layers_left == 0) {
    out.push_back(current);
    return;
  }
  for (int len = 1; len <= layers_left; ++len) {
    current.blocks.emplace_back();
    fill_block(cfg, len, 1, current, layers_left - len, out);
    current.blocks.pop_back();
  }
}

void fill_block(const EnumerationConfig& cfg, int block_len, long long product, RadixList& current,
                int layers_left, std::vector<RadixList>& out) {
  if (block_len == 0) {
    fill_blocks(cfg, current, layers_left, out);
    return;
  }
  for (int f = cfg.min_factor; f <= cfg.max_factor; ++f) {
    const long long next = product * f;
    if (next > cfg.max_block_product) break;  // factors ascend, the product only grows
    current.blocks.back().push_back(f);
    fill_block(cfg, block_len - 1, next, current, layers_left, out);
    current.blocks.back().pop_back();
  }
}

std::vector<std::vector<int>> sorted_blocks_key(const RadixList& rl) {
  std::vector<std::vector<int>> key = rl.blocks;
  std::sort(key.begin(), key.end());
  return key;
}

}  // namespace

std::vector<RadixList> enumerate_radix_lists(const EnumerationConfig& cfg) {
  if (cfg.min_factor < 1) throw std::invalid_argument("enumeration: min_factor must be >= 1");
  if (cfg.max_factor < cfg.min_factor) throw std::invalid_argument("enumeration: max_factor < min_factor");
  if (cfg.num_weight_layers < 1) throw std::invalid_argument("enumeration: need at least one weight layer");
  if (cfg.max_block_product < 1) throw std::invalid_argument("enumeration: max_block_product must be >= 1");

  std::vector<RadixList> all;
  RadixList current;
  fill_blocks(cfg, current, cfg.num_weight_layers, all);
  std::sort(all.begin(), all.end(),
            [](const RadixList& a, const RadixList& b) { return a.blocks < b.blocks; });

  if (cfg.dedup_mode == DedupMode::exact_list) {
    all.erase(std::unique(all.begin(), all.end()), all.end());
    return all;
  }
  std::vector<RadixList> kept;
  std::set<std::vector<std::vector<int>>> seen;
  for (RadixList& rl : all) {
    if (seen.insert(sorted_blocks_key(rl)).second) kept.push_back(std::move(rl));
  }
  return kept;
}

int sparsity_bin(long long zeros, long long total) {
  if (total <= 0 || zeros < 0 || zeros > total) throw std::invalid_argument("sparsity_bin: bad counts");
  const long long k = 10 * zeros / total;  // floor(10 * sparsity), exact
  return static_cast<int>(std::min<long long>(k, 9));
}

namespace {

// (zeros, total) over all masks of the list's topology on the architecture.
std::pair<long long, long long> zero_counts(const RadixList& rl, const Architecture& arch) {
  Topology topo = build_topology(rl, arch);
  long long nnz = 0, total = 0;
  for (const LayerMask& m : topo.masks) {
    nnz += m.nnz();
    total += m.size();
  }
  return {total - nnz, total};
}

}  // namespace

SparsityHistogram sparsity_distribution(const std::vector<RadixList>& lists, const Architecture& arch) {
  if (lists.empty()) throw std::invalid_argument("sparsity_distribution: no radix lists");
  SparsityHistogram hist;
  for (const RadixList& rl : lists) {
    auto [zeros, total] = zero_counts(rl, arch);
    ++hist.counts[static_cast<std::size_t>(sparsity_bin(zeros, total))];
    ++hist.total;
  }
  return hist;
}

std::map<int, std::vector<RadixList>> sample_by_sparsity(const std::vector<RadixList>& lists,
                                                         const Architecture& arch, int per_decile,
                                                         std::uint64_t seed) {
  if (lists.empty()) throw std::invalid_argument("sample_by_sparsity: no radix lists");
  if (per_decile < 1) throw std::invalid_argument("sample_by_sparsity: per_decile must be >= 1");

  std::map<int, std::vector<RadixList>> groups;
  for (const RadixList& rl : lists) {
    auto [zeros, total] = zero_counts(rl, arch);
    groups[sparsity_bin(zeros, total)].push_back(rl);
  }
  for (auto& [decile, members] : groups) {
    const int n = static_cast<int>(members.size());
    if (n <= per_decile) continue;
    // Seeded partial Fisher-Yates over the index set, then restore
    // enumeration order among the chosen.
    std::vector<int> idx(members.size());
    for (int i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(decile)));
    rng.shuffle(idx);
    idx.resize(static_cast<std::size_t>(per_decile));
    std::sort(idx.begin(), idx.end());
    std::vector<RadixList> chosen;
    chosen.reserve(idx.size());
    for (int i : idx) chosen.push_back(std::move(members[static_cast<std::size_t>(i)]));
    members = std::move(chosen);
  }
  return groups;
}

void write_sparsity_csv(const std::vector<RadixList>& lists, const Architecture& arch, std::ostream& out) {
  out << "radix_list,sparsity\n";
  for (const RadixList& rl : lists) {
    auto [zeros, total] = zero_counts(rl, arch);
    const double sparsity = static_cast<double>(zeros) / static_cast<double>(total);
    out << '"' << format_radix_list(rl) << "\"," << std::fixed << std::setprecision(6) << sparsity << "\n";
    out.unsetf(std::ios_base::floatfield);
  }
}

void write_histogram_csv(const SparsityHistogram& hist, std::ostream& out) {
  out << "bin_lo,bin_hi,count\n";
  for (int k = 0; k < 10; ++k) {
    out << std::fixed << std::setprecision(1) << (k / 10.0) << ',' << ((k + 1) / 10.0) << ','
        << hist.counts[static_cast<std::size_t>(k)] << "\n";
  }
  out.unsetf(std::ios_base::floatfield);
}

}  // namespace radixnet
