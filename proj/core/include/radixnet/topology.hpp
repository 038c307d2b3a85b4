#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace radixnet {

class TopologyError : public std::runtime_error {
 public:
  explicit TopologyError(const std::string& what) : std::runtime_error(what) {}
};

// A radix list is a list of blocks; each block is a list of radices >= 1.
// Block boundaries matter: [[2,2],[2]] and [[2],[2,2]] are different layouts.
// A block of k radices contributes k weight-layer masks, so the block lengths
// must sum to (#architecture layers - 1).
struct RadixList {
  std::vector<std::vector<int>> blocks;

  bool operator==(const RadixList&) const = default;
};

// Parses the bracket literal form, e.g. "[[10,10],[10]]". Whitespace between
// tokens is allowed. Throws TopologyError on malformed input.
RadixList parse_radix_list(std::string_view text);

// Canonical literal form, no whitespace: "[[10,10],[10]]".
std::string format_radix_list(const RadixList& rl);

// Filesystem-safe name: radices joined by '-' within a block, blocks joined
// by '_'. [[10,10],[10]] -> "10-10_10".
std::string radix_list_slug(const RadixList& rl);

// Layer widths, inputs first. A valid MLP needs at least 2 entries.
struct Architecture {
  std::vector<int> layer_widths;

  bool operator==(const Architecture&) const = default;
  int num_weight_layers() const { return static_cast<int>(layer_widths.size()) - 1; }
};

// Dense 0/1 mask stored row-major as bytes. Row = source node, col = target.
struct LayerMask {
  int rows = 0;
  int cols = 0;
  std::vector<std::uint8_t> bits;  // rows*cols entries, each 0 or 1

  std::uint8_t at(int r, int c) const {
    return bits[static_cast<std::size_t>(r) * static_cast<std::size_t>(cols) + static_cast<std::size_t>(c)];
  }
  void set(int r, int c, std::uint8_t v) {
    bits[static_cast<std::size_t>(r) * static_cast<std::size_t>(cols) + static_cast<std::size_t>(c)] = v;
  }
  long long size() const { return static_cast<long long>(rows) * cols; }
  long long nnz() const;

  bool operator==(const LayerMask&) const = default;
};

struct Topology {
  RadixList radix_list;
  Architecture architecture;
  std::vector<LayerMask> masks;  // one per weight layer, masks[t]: widths[t] x widths[t+1]
  double sparsity = 0.0;         // 1 - nnz/size over all masks
};

// Builds the k square N x N masks for one block of k radices, N = product of
// the radices. Node index i is read as a mixed-radix numeral with the block's
// radices as digits, least significant first (digit t of i is
// (i / prod(radices before t)) mod radix_t). Mask t connects i -> j exactly
// when i and j agree on every digit except digit t. Consequences: every node
// has in/out degree radix_t in mask t, and mask t has density radix_t / N.
std::vector<LayerMask> mixed_radix_block(const std::vector<int>& radices);

// Fits a square block mask onto real layer dimensions: Kronecker product with
// an all-ones ceil(target_rows/rows) x ceil(target_cols/cols) matrix, then
// trailing rows/cols trimmed to exactly target_rows x target_cols. Each
// original edge becomes a fully connected bipartite patch (possibly clipped).
LayerMask expand_mask(const LayerMask& mask, int target_rows, int target_cols);

// All-ones masks for every weight layer (the dense baseline as a Topology).
Topology dense_topology(const Architecture& arch);

// Full pipeline: per-block square masks, expanded in order onto consecutive
// layer pairs. Throws TopologyError if the block lengths don't sum to the
// number of weight layers, any radix < 1, any block product exceeds 2^31, or
// any expanded mask ends up empty.
Topology build_topology(const RadixList& rl, const Architecture& arch);

// Exact sparsity (1 - total nnz / total entries) via integer counts.
double sparsity_of(const std::vector<LayerMask>& masks);

// Boolean chain product of all masks: entry (i, j) is 1 iff some path of
// mask edges leads from input node i to output node j.
LayerMask reachability(const Topology& topo);

// Run-length encoding of a mask's row-major bits: first entry counts leading
// zeros (possibly 0), then alternating one-runs and zero-runs. Runs after the
// first are all positive and the run sum equals rows*cols.
std::vector<long long> rle_encode(const LayerMask& mask);
LayerMask rle_decode(int rows, int cols, const std::vector<long long>& runs);

// JSON serialization with RLE-packed masks. Round-trips exactly; the decoder
// validates shapes, run sums, and recomputes sparsity.
std::string topology_to_json(const Topology& topo);
Topology topology_from_json(const std::string& text);

}  // namespace radixnet
