#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <ostream>
#include <vector>

#include "radixnet/topology.hpp"

namespace radixnet {

// Two notions of "the same" radix list: exact nested equality, or equality of
// the block multisets (block order ignored, digit order within a block kept).
enum class DedupMode { exact_list, sorted_blocks };

struct EnumerationConfig {
  int min_factor = 1;
  int max_factor = 10;
  int num_weight_layers = 3;
  long long max_block_product = 10'000;  // cap on each block's radix product
  DedupMode dedup_mode = DedupMode::exact_list;
};

// Every radix list whose block lengths compose num_weight_layers, with each
// radix in [min_factor, max_factor] and each block product <= the cap.
// Output is lexicographically sorted (nested-sequence order) and deduplicated
// per dedup_mode (first representative kept). Throws std::invalid_argument on
// a nonsensical config (min < 1, max < min, layers < 1, cap < 1).
std::vector<RadixList> enumerate_radix_lists(const EnumerationConfig& cfg);

// Decile histogram over [0,1]: bins [0,0.1), ..., [0.8,0.9), [0.9,1.0].
struct SparsityHistogram {
  std::array<long long, 10> counts{};
  long long total = 0;
};

// Exact decile index from integer zero/total counts (no float rounding):
// largest k with zeros/total >= k/10, clamped to 9.
int sparsity_bin(long long zeros, long long total);

// Builds each topology on the architecture and bins its sparsity.
// Throws std::invalid_argument on an empty list set.
SparsityHistogram sparsity_distribution(const std::vector<RadixList>& lists, const Architecture& arch);

// Groups lists by sparsity decile, then picks at most per_decile of each
// group without replacement (seeded, deterministic; groups at or under the
// budget are returned whole, in enumeration order). Only non-empty deciles
// appear in the result.
std::map<int, std::vector<RadixList>> sample_by_sparsity(const std::vector<RadixList>& lists,
                                                         const Architecture& arch, int per_decile,
                                                         std::uint64_t seed);

// "radix_list,sparsity" rows, sparsity printed with 6 decimals.
void write_sparsity_csv(const std::vector<RadixList>& lists, const Architecture& arch, std::ostream& out);

// "bin_lo,bin_hi,count" rows for the 10 decile bins.
void write_histogram_csv(const SparsityHistogram& hist, std::ostream& out);

}  // namespace radixnet
