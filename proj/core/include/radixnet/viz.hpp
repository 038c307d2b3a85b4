#pragma once

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "radixnet/experiments.hpp"
#include "radixnet/matrix.hpp"
#include "radixnet/nn.hpp"
#include "radixnet/topology.hpp"

namespace radixnet {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
};

enum class ImageFormat { svg, pgm };

struct RenderConfig {
  int cell_size = 8;            // heatmap cell edge, pixels
  Rgb on_color{253, 231, 37};   // nonzero cells: viridis yellow
  Rgb off_color{68, 1, 84};     // zero cells: viridis purple
  int max_nodes_per_layer = 64;  // graph rendering cap per column
  ImageFormat format = ImageFormat::pgm;  // saliency output flavor
};

// Adjacency heatmap of a binary mask as an SVG document: an off-color
// background plus one rect per run of consecutive on-cells in a row (cells
// merge horizontally, so the on-area always equals nnz cells). Throws
// std::invalid_argument on an empty mask or a bad config.
std::string render_heatmap(const LayerMask& mask, const RenderConfig& cfg = {});

// Heatmap of a real-valued matrix: per-cell linear grayscale from the matrix
// minimum (black) to maximum (white), equal consecutive shades merged per
// row. A constant matrix renders mid-gray.
std::string render_heatmap(const Matrix& values, const RenderConfig& cfg = {});

// Layered node-and-edge view of a topology: layers as columns of circles,
// mask 1-bits as line segments, columns centered vertically. Layers wider
// than max_nodes_per_layer draw a uniform-stride subsample of their nodes and
// an annotation saying so; edges are drawn only between drawn nodes.
std::string render_layered_graph(const Topology& topo, const RenderConfig& cfg = {});

// Saliency image. PGM output is binary P5, header "P5\n28 28\n255\n", one
// byte per pixel = round(255 * value) in row-major order; SVG output renders
// the same bytes as a grayscale heatmap. Requires a 28x28 map.
std::string render_saliency(const SaliencyMap& map, const RenderConfig& cfg = {});

// Long-format training curves, one row per epoch per report, reports keeping
// their input order as run_id 0, 1, ...:
// "run_id,epoch,train_loss,train_acc,val_loss,val_acc".
void write_curves(const std::vector<TrainReport>& reports, std::ostream& out);

// Same, to a file; throws std::runtime_error when the path cannot be opened.
void write_curves(const std::vector<TrainReport>& reports, const std::filesystem::path& path);

}  // namespace radixnet
