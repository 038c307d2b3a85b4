#include "radixnet/topology.hpp"

#include <cctype>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

namespace radixnet {

namespace {

// Thrown-message helper: "[[10,10],[10]]"-style rendering of one block.
std::string format_block(const std::vector<int>& block) {
  std::string out = "[";
  for (std::size_t i = 0; i < block.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(block[i]);
  }
  out += ']';
  return out;
}

}  // namespace

long long LayerMask::nnz() const {
  long long n = 0;
  for (std::uint8_t b : bits) n += b;
  return n;
}

RadixList parse_radix_list(std::string_view text) {
  std::size_t pos = 0;
  auto skip_ws = [&] {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  };
  auto fail = [&](const std::string& why) -> TopologyError {
    return TopologyError("bad radix list '" + std::string(text) + "': " + why);
  };
  auto expect = [&](char c) {
    skip_ws();
    if (pos >= text.size() || text[pos] != c)
      throw fail(std::string("expected '") + c + "' at offset " + std::to_string(pos));
    ++pos;
  };
  auto parse_int = [&]() -> int {
    skip_ws();
    std::size_t start = pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos == start) throw fail("expected a radix at offset " + std::to_string(pos));
    long long v = 0;
    for (std::size_t i = start; i < pos; ++i) {
      v = v * 10 + (text[i] - '0');
      if (v > 1'000'000'000LL) throw fail("radix out of range");
    }
    return static_cast<int>(v);
  };

  RadixList rl;
  expect('[');
  skip_ws();
  if (pos < text.size() && text[pos] == ']') {
    throw fail("no blocks");
  }
  while (true) {
    expect('[');
    std::vector<int> block;
    skip_ws();
    if (pos < text.size() && text[pos] == ']') throw fail("empty block");
    while (true) {
      block.push_back(parse_int());
      skip_ws();
      if (pos < text.size() && text[pos] == ',') {
        ++pos;
        continue;
      }
      break;
    }
    expect(']');
    rl.blocks.push_back(std::move(block));
    skip_ws();
    if (pos < text.size() && text[pos] == ',') {
      ++pos;
      continue;
    }
    break;
  }
  expect(']');
  skip_ws();
  if (pos != text.size()) throw fail("trailing characters at offset " + std::to_string(pos));
  return rl;
}

std::string format_radix_list(const RadixList& rl) {
  std::string out = "[";
  for (std::size_t b = 0; b < rl.blocks.size(); ++b) {
    if (b) out += ',';
    out += format_block(rl.blocks[b]);
  }
  out += ']';
  return out;
}

std::string radix_list_slug(const RadixList& rl) {
  std::string out;
  for (std::size_t b = 0; b < rl.blocks.size(); ++b) {
    if (b) out += '_';
    for (std::size_t i = 0; i < rl.blocks[b].size(); ++i) {
      if (i) out += '-';
      out += std::to_string(rl.blocks[b][i]);
    }
  }
  return out;
}

std::vector<LayerMask> mixed_radix_block(const std::vector<int>& radices) {
  if (radices.empty()) throw TopologyError("empty radix block");
  long long n = 1;
  for (int b : radices) {
    if (b < 1) throw TopologyError("radix " + std::to_string(b) + " in block " + format_block(radices) + " is < 1");
    n *= b;
    if (n > (1LL << 31)) throw TopologyError("block " + format_block(radices) + " product exceeds 2^31");
  }
  const int N = static_cast<int>(n);
  const int k = static_cast<int>(radices.size());

  std::vector<LayerMask> masks(static_cast<std::size_t>(k));
  long long stride = 1;  // product of radices before digit t
  for (int t = 0; t < k; ++t) {
    const long long b = radices[static_cast<std::size_t>(t)];
    LayerMask& m = masks[static_cast<std::size_t>(t)];
    m.rows = N;
    m.cols = N;
    m.bits.assign(static_cast<std::size_t>(N) * static_cast<std::size_t>(N), 0);
    // i -> j iff all digits except digit t agree, i.e. j ranges over i with
    // digit t replaced by each of the b possible values:
    //   j = i - digit_t(i)*stride + d*stride,  d = 0..b-1.
    for (long long i = 0; i < N; ++i) {
      const long long base = i - ((i / stride) % b) * stride;
      for (long long d = 0; d < b; ++d) {
        m.set(static_cast<int>(i), static_cast<int>(base + d * stride), 1);
      }
    }
    stride *= b;
  }
  return masks;
}

LayerMask expand_mask(const LayerMask& mask, int target_rows, int target_cols) {
  if (mask.rows <= 0 || mask.cols <= 0) throw TopologyError("expand_mask: empty source mask");
  if (target_rows <= 0 || target_cols <= 0) throw TopologyError("expand_mask: non-positive target shape");
  if (static_cast<long long>(target_rows) * target_cols > (1LL << 31))
    throw TopologyError("expand_mask: target size exceeds 2^31 entries");

  const int rr = (target_rows + mask.rows - 1) / mask.rows;  // ones-block height
  const int cc = (target_cols + mask.cols - 1) / mask.cols;  // ones-block width

  LayerMask out;
  out.rows = target_rows;
  out.cols = target_cols;
  out.bits.assign(static_cast<std::size_t>(target_rows) * static_cast<std::size_t>(target_cols), 0);
  // Kron(mask, ones(rr, cc)) truncated to the target window: cell (r, c) of the
  // product is mask(r / rr, c / cc), so index directly instead of materializing
  // the oversized intermediate.
  for (int r = 0; r < target_rows; ++r) {
    const int sr = r / rr;
    for (int c = 0; c < target_cols; ++c) {
      out.set(r, c, mask.at(sr, c / cc));
    }
  }
  if (out.nnz() == 0)
    throw TopologyError("expand_mask: trimming to " + std::to_string(target_rows) + "x" +
                        std::to_string(target_cols) + " removed every connection");
  return out;
}

Topology dense_topology(const Architecture& arch) {
  if (arch.layer_widths.size() < 2) throw TopologyError("architecture needs at least 2 layers");
  Topology topo;
  // A single block of radix-1 digits yields all-ones masks of the right count.
  topo.radix_list.blocks.push_back(std::vector<int>(static_cast<std::size_t>(arch.num_weight_layers()), 1));
  topo.architecture = arch;
  for (int t = 0; t < arch.num_weight_layers(); ++t) {
    LayerMask m;
    m.rows = arch.layer_widths[static_cast<std::size_t>(t)];
    m.cols = arch.layer_widths[static_cast<std::size_t>(t) + 1];
    if (m.rows <= 0 || m.cols <= 0) throw TopologyError("architecture widths must be positive");
    m.bits.assign(static_cast<std::size_t>(m.rows) * static_cast<std::size_t>(m.cols), 1);
    topo.masks.push_back(std::move(m));
  }
  topo.sparsity = 0.0;
  return topo;
}

Topology build_topology(const RadixList& rl, const Architecture& arch) {
  if (arch.layer_widths.size() < 2) throw TopologyError("architecture needs at least 2 layers");
  for (int w : arch.layer_widths) {
    if (w <= 0) throw TopologyError("architecture widths must be positive");
  }
  if (rl.blocks.empty()) throw TopologyError("radix list has no blocks");

  long long mask_count = 0;
  for (const auto& block : rl.blocks) mask_count += static_cast<long long>(block.size());
  if (mask_count != arch.num_weight_layers()) {
    throw TopologyError("radix list " + format_radix_list(rl) + " supplies " + std::to_string(mask_count) +
                        " weight layers but architecture has " + std::to_string(arch.num_weight_layers()));
  }

  Topology topo;
  topo.radix_list = rl;
  topo.architecture = arch;
  int layer = 0;  // weight-layer cursor across blocks
  for (const auto& block : rl.blocks) {
    std::vector<LayerMask> square = mixed_radix_block(block);
    for (LayerMask& m : square) {
      topo.masks.push_back(expand_mask(m, arch.layer_widths[static_cast<std::size_t>(layer)],
                                       arch.layer_widths[static_cast<std::size_t>(layer) + 1]));
      ++layer;
    }
  }
  topo.sparsity = sparsity_of(topo.masks);
  return topo;
}

double sparsity_of(const std::vector<LayerMask>& masks) {
  long long nnz = 0;
  long long total = 0;
  for (const LayerMask& m : masks) {
    nnz += m.nnz();
    total += m.size();
  }
  if (total == 0) throw TopologyError("sparsity of empty mask list");
  return 1.0 - static_cast<double>(nnz) / static_cast<double>(total);
}

LayerMask reachability(const Topology& topo) {
  if (topo.masks.empty()) throw TopologyError("reachability of empty topology");
  LayerMask reach = topo.masks.front();
  for (std::size_t t = 1; t < topo.masks.size(); ++t) {
    const LayerMask& next = topo.masks[t];
    if (reach.cols != next.rows) throw TopologyError("mask shapes do not chain");
    LayerMask prod;
    prod.rows = reach.rows;
    prod.cols = next.cols;
    prod.bits.assign(static_cast<std::size_t>(prod.rows) * static_cast<std::size_t>(prod.cols), 0);
    for (int i = 0; i < reach.rows; ++i) {
      for (int m = 0; m < reach.cols; ++m) {
        if (!reach.at(i, m)) continue;
        for (int j = 0; j < next.cols; ++j) {
          if (next.at(m, j)) prod.set(i, j, 1);
        }
      }
    }
    reach = std::move(prod);
  }
  return reach;
}

std::vector<long long> rle_encode(const LayerMask& mask) {
  std::vector<long long> runs;
  std::uint8_t current = 0;  // encoding starts with the zero-run length
  long long len = 0;
  for (std::uint8_t b : mask.bits) {
    if (b == current) {
      ++len;
    } else {
      runs.push_back(len);
      current = b;
      len = 1;
    }
  }
  runs.push_back(len);
  return runs;
}

LayerMask rle_decode(int rows, int cols, const std::vector<long long>& runs) {
  if (rows <= 0 || cols <= 0) throw TopologyError("rle_decode: non-positive shape");
  LayerMask mask;
  mask.rows = rows;
  mask.cols = cols;
  const long long total = static_cast<long long>(rows) * cols;
  mask.bits.assign(static_cast<std::size_t>(total), 0);
  long long pos = 0;
  std::uint8_t value = 0;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    const long long len = runs[r];
    if (len < 0 || (r > 0 && len == 0)) throw TopologyError("rle_decode: invalid run length");
    if (pos + len > total) throw TopologyError("rle_decode: runs exceed mask size");
    if (value) {
      for (long long i = 0; i < len; ++i) mask.bits[static_cast<std::size_t>(pos + i)] = 1;
    }
    pos += len;
    value = static_cast<std::uint8_t>(1 - value);
  }
  if (pos != total) throw TopologyError("rle_decode: runs sum to " + std::to_string(pos) + ", expected " +
                                        std::to_string(total));
  return mask;
}

std::string topology_to_json(const Topology& topo) {
  nlohmann::json j;
  j["radix_list"] = topo.radix_list.blocks;
  j["architecture"] = topo.architecture.layer_widths;
  j["sparsity"] = topo.sparsity;
  nlohmann::json masks = nlohmann::json::array();
  for (const LayerMask& m : topo.masks) {
    masks.push_back({{"rows", m.rows}, {"cols", m.cols}, {"rle", rle_encode(m)}});
  }
  j["masks"] = std::move(masks);
  return j.dump(2) + "\n";
}

Topology topology_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw TopologyError(std::string("topology JSON parse failure: ") + e.what());
  }
  try {
    Topology topo;
    topo.radix_list.blocks = j.at("radix_list").get<std::vector<std::vector<int>>>();
    topo.architecture.layer_widths = j.at("architecture").get<std::vector<int>>();
    for (const auto& jm : j.at("masks")) {
      topo.masks.push_back(rle_decode(jm.at("rows").get<int>(), jm.at("cols").get<int>(),
                                      jm.at("rle").get<std::vector<long long>>()));
    }
    if (topo.masks.size() != static_cast<std::size_t>(topo.architecture.num_weight_layers()))
      throw TopologyError("topology JSON: mask count does not match architecture");
    for (std::size_t t = 0; t < topo.masks.size(); ++t) {
      if (topo.masks[t].rows != topo.architecture.layer_widths[t] ||
          topo.masks[t].cols != topo.architecture.layer_widths[t + 1])
        throw TopologyError("topology JSON: mask " + std::to_string(t) + " shape does not match architecture");
    }
    topo.sparsity = sparsity_of(topo.masks);
    if (j.contains("sparsity")) {
      const double recorded = j["sparsity"].get<double>();
      if (std::abs(recorded - topo.sparsity) > 1e-9)
        throw TopologyError("topology JSON: recorded sparsity disagrees with masks");
    }
    return topo;
  } catch (const nlohmann::json::exception& e) {
    throw TopologyError(std::string("topology JSON structure failure: ") + e.what());
  }
}

}  // namespace radixnet
