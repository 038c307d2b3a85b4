#include <bit>
#include <cstring>
#include <fstream>

#include <nlohmann/json.hpp>

#include "radixnet/nn.hpp"

namespace radixnet {

namespace {

constexpr const char* kFormatTag = "radixnet-checkpoint";
constexpr int kVersion = 1;

void write_f64_le(std::ostream& out, const double* values, std::size_t count) {
  std::vector<unsigned char> buf(count * 8);
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint64_t bits = std::bit_cast<std::uint64_t>(values[i]);
    for (int b = 0; b < 8; ++b) buf[i * 8 + static_cast<std::size_t>(b)] = static_cast<unsigned char>(bits >> (8 * b));
  }
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
}

void read_f64_le(std::istream& in, double* values, std::size_t count, const std::string& what) {
  std::vector<unsigned char> buf(count * 8);
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (static_cast<std::size_t>(in.gcount()) != buf.size())
    throw NnError("checkpoint: truncated payload while reading " + what);
  for (std::size_t i = 0; i < count; ++i) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) bits |= std::uint64_t{buf[i * 8 + static_cast<std::size_t>(b)]} << (8 * b);
    values[i] = std::bit_cast<double>(bits);
  }
}

LayerMask mask_from_matrix(const Matrix& m) {
  LayerMask mask;
  mask.rows = static_cast<int>(m.rows());
  mask.cols = static_cast<int>(m.cols());
  mask.bits.resize(static_cast<std::size_t>(m.size()));
  for (Eigen::Index i = 0; i < m.size(); ++i) mask.bits[static_cast<std::size_t>(i)] = m.data()[i] != 0.0 ? 1 : 0;
  return mask;
}

}  // namespace

void save_checkpoint(const MlpModel& model, const std::filesystem::path& path) {
  if (model.layers.empty()) throw NnError("checkpoint: refusing to save an empty model");
  nlohmann::json header;
  header["format"] = kFormatTag;
  header["version"] = kVersion;
  header["architecture"] = model.architecture().layer_widths;
  header["radix_list"] = model.radix_list.blocks;
  header["init_seed"] = model.init_seed;
  header["step_count"] = model.step_count;
  nlohmann::json layers = nlohmann::json::array();
  for (const LayerParams& layer : model.layers) {
    layers.push_back({{"rows", layer.weights.rows()},
                      {"cols", layer.weights.cols()},
                      {"mask_rle", rle_encode(mask_from_matrix(layer.mask))}});
  }
  header["layers"] = std::move(layers);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw NnError("checkpoint: cannot open " + path.string() + " for writing");
  out << header.dump() << "\n";
  for (const LayerParams& layer : model.layers) {
    write_f64_le(out, layer.weights.data(), static_cast<std::size_t>(layer.weights.size()));
    write_f64_le(out, layer.bias.data(), static_cast<std::size_t>(layer.bias.size()));
  }
  if (!out.good()) throw NnError("checkpoint: write failure on " + path.string());
}

MlpModel load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NnError("checkpoint: cannot open " + path.string());
  std::string header_line;
  if (!std::getline(in, header_line)) throw NnError("checkpoint: missing header line in " + path.string());

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(header_line);
  } catch (const nlohmann::json::exception& e) {
    throw NnError("checkpoint: malformed header in " + path.string() + ": " + e.what());
  }
  try {
    if (header.at("format").get<std::string>() != kFormatTag)
      throw NnError("checkpoint: " + path.string() + " is not a model checkpoint");
    if (header.at("version").get<int>() != kVersion)
      throw NnError("checkpoint: unsupported version in " + path.string());

    MlpModel model;
    model.radix_list.blocks = header.at("radix_list").get<std::vector<std::vector<int>>>();
    model.init_seed = header.at("init_seed").get<std::uint64_t>();
    model.step_count = header.at("step_count").get<std::int64_t>();
    const auto widths = header.at("architecture").get<std::vector<int>>();
    const auto& layers = header.at("layers");
    if (widths.size() < 2 || layers.size() != widths.size() - 1)
      throw NnError("checkpoint: layer list does not match architecture in " + path.string());

    for (std::size_t t = 0; t < layers.size(); ++t) {
      const int rows = layers[t].at("rows").get<int>();
      const int cols = layers[t].at("cols").get<int>();
      if (rows != widths[t] || cols != widths[t + 1])
        throw NnError("checkpoint: layer " + std::to_string(t) + " shape mismatch in " + path.string());
      LayerMask mask = rle_decode(rows, cols, layers[t].at("mask_rle").get<std::vector<long long>>());
      LayerParams layer;
      layer.mask.resize(rows, cols);
      for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) layer.mask(r, c) = mask.at(r, c);
      layer.weights.resize(rows, cols);
      layer.bias.resize(cols);
      read_f64_le(in, layer.weights.data(), static_cast<std::size_t>(layer.weights.size()),
                  "layer " + std::to_string(t) + " weights");
      read_f64_le(in, layer.bias.data(), static_cast<std::size_t>(layer.bias.size()),
                  "layer " + std::to_string(t) + " bias");
      layer.weights = layer.weights.cwiseProduct(layer.mask);  // re-pin the invariant
      model.layers.push_back(std::move(layer));
    }
    char extra;
    if (in.read(&extra, 1).gcount() != 0)
      throw NnError("checkpoint: trailing bytes after payload in " + path.string());
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw NnError("checkpoint: malformed header field in " + path.string() + ": " + e.what());
  } catch (const TopologyError& e) {
    throw NnError("checkpoint: bad mask encoding in " + path.string() + ": " + e.what());
  }
}

}  // namespace radixnet
