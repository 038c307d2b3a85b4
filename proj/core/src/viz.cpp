#include "radixnet/viz.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace radixnet {

namespace {

void check_config(const RenderConfig& cfg) {
  if (cfg.cell_size < 1) throw std::invalid_argument("cell_size must be at least 1");
  if (cfg.max_nodes_per_layer < 2) throw std::invalid_argument("max_nodes_per_layer must be at least 2");
}

std::string hex_color(Rgb c) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", c.r, c.g, c.b);
  return buf;
}

std::string svg_open(int width, int height) {
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" height=\"%d\" "
                "viewBox=\"0 0 %d %d\">\n",
                width, height, width, height);
  return buf;
}

void append_rect(std::string& out, int x, int y, int w, int h, const std::string& fill) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "  <rect x=\"%d\" y=\"%d\" width=\"%d\" height=\"%d\" fill=\"%s\"/>\n",
                x, y, w, h, fill.c_str());
  out += buf;
}

// Gray bytes rendered as a cell grid, equal consecutive shades merged per row.
std::string gray_grid_svg(const std::vector<std::uint8_t>& gray, int rows, int cols, int cell) {
  std::string out = svg_open(cols * cell, rows * cell);
  for (int r = 0; r < rows; ++r) {
    int c = 0;
    while (c < cols) {
      const std::uint8_t shade = gray[static_cast<std::size_t>(r) * cols + c];
      int end = c + 1;
      while (end < cols && gray[static_cast<std::size_t>(r) * cols + end] == shade) ++end;
      append_rect(out, c * cell, r * cell, (end - c) * cell, cell, hex_color({shade, shade, shade}));
      c = end;
    }
  }
  out += "</svg>\n";
  return out;
}

// round(255 * v), clamped to a byte.
std::uint8_t to_byte(double v) {
  const long b = std::lround(255.0 * v);
  return static_cast<std::uint8_t>(std::clamp(b, 0L, 255L));
}

// Index subsample for one layer column: every node when it fits the cap,
// otherwise exactly cap nodes at a uniform (fractional) stride.
std::vector<int> drawn_nodes(int n, int cap) {
  const int k = std::min(n, cap);
  std::vector<int> idx;
  for (int i = 0; i < k; ++i) idx.push_back(static_cast<int>(static_cast<long long>(i) * n / k));
  return idx;
}

}  // namespace

std::string render_heatmap(const LayerMask& mask, const RenderConfig& cfg) {
  check_config(cfg);
  if (mask.rows < 1 || mask.cols < 1) throw std::invalid_argument("cannot render an empty mask");
  const int cell = cfg.cell_size;
  const std::string on = hex_color(cfg.on_color);
  const std::string off = hex_color(cfg.off_color);

  std::string out = svg_open(mask.cols * cell, mask.rows * cell);
  for (int r = 0; r < mask.rows; ++r) {
    int c = 0;
    while (c < mask.cols) {
      const std::uint8_t bit = mask.at(r, c);
      int end = c + 1;
      while (end < mask.cols && mask.at(r, end) == bit) ++end;
      append_rect(out, c * cell, r * cell, (end - c) * cell, cell, bit ? on : off);
      c = end;
    }
  }
  out += "</svg>\n";
  return out;
}

std::string render_heatmap(const Matrix& values, const RenderConfig& cfg) {
  check_config(cfg);
  if (values.rows() < 1 || values.cols() < 1) throw std::invalid_argument("cannot render an empty matrix");
  const double lo = values.minCoeff();
  const double hi = values.maxCoeff();
  std::vector<std::uint8_t> gray(static_cast<std::size_t>(values.size()));
  for (int r = 0; r < values.rows(); ++r)
    for (int c = 0; c < values.cols(); ++c)
      gray[static_cast<std::size_t>(r) * values.cols() + c] =
          hi > lo ? to_byte((values(r, c) - lo) / (hi - lo)) : std::uint8_t{128};
  return gray_grid_svg(gray, static_cast<int>(values.rows()), static_cast<int>(values.cols()),
                       cfg.cell_size);
}

std::string render_layered_graph(const Topology& topo, const RenderConfig& cfg) {
  check_config(cfg);
  if (topo.masks.empty()) throw std::invalid_argument("cannot render a topology without masks");

  const std::vector<int>& widths = topo.architecture.layer_widths;
  const int columns = static_cast<int>(widths.size());
  std::vector<std::vector<int>> nodes;
  int max_drawn = 0;
  for (int w : widths) {
    nodes.push_back(drawn_nodes(w, cfg.max_nodes_per_layer));
    max_drawn = std::max(max_drawn, static_cast<int>(nodes.back().size()));
  }

  const int margin = 20, node_gap = 14, column_gap = 120, radius = 4;
  const int width = 2 * margin + (columns - 1) * column_gap;
  const int height = 2 * margin + (max_drawn - 1) * node_gap;
  auto x_of = [&](int layer) { return margin + layer * column_gap; };
  // columns share a vertical center (node counts differ by whole gaps/2)
  auto y_of = [&](int layer, int slot) {
    return margin + (max_drawn - static_cast<int>(nodes[static_cast<std::size_t>(layer)].size())) * node_gap / 2 +
           slot * node_gap;
  };

  std::string out = svg_open(width, height);
  char buf[256];
  for (int t = 0; t + 1 < columns; ++t) {
    const LayerMask& mask = topo.masks[static_cast<std::size_t>(t)];
    const auto& src = nodes[static_cast<std::size_t>(t)];
    const auto& dst = nodes[static_cast<std::size_t>(t) + 1];
    for (std::size_t i = 0; i < src.size(); ++i)
      for (std::size_t j = 0; j < dst.size(); ++j)
        if (mask.at(src[i], dst[j])) {
          std::snprintf(buf, sizeof buf,
                        "  <line x1=\"%d\" y1=\"%d\" x2=\"%d\" y2=\"%d\" stroke=\"#999999\" "
                        "stroke-width=\"1\"/>\n",
                        x_of(t), y_of(t, static_cast<int>(i)), x_of(t + 1), y_of(t + 1, static_cast<int>(j)));
          out += buf;
        }
  }
  for (int l = 0; l < columns; ++l)
    for (std::size_t i = 0; i < nodes[static_cast<std::size_t>(l)].size(); ++i) {
      std::snprintf(buf, sizeof buf, "  <circle cx=\"%d\" cy=\"%d\" r=\"%d\" fill=\"#333333\"/>\n",
                    x_of(l), y_of(l, static_cast<int>(i)), radius);
      out += buf;
    }
  for (int l = 0; l < columns; ++l)
    if (static_cast<int>(nodes[static_cast<std::size_t>(l)].size()) < widths[static_cast<std::size_t>(l)]) {
      std::snprintf(buf, sizeof buf,
                    "  <text x=\"%d\" y=\"%d\" font-size=\"10\" text-anchor=\"middle\">layer %d: %zu of %d "
                    "nodes</text>\n",
                    x_of(l), height - 6, l, nodes[static_cast<std::size_t>(l)].size(),
                    widths[static_cast<std::size_t>(l)]);
      out += buf;
    }
  out += "</svg>\n";
  return out;
}

std::string render_saliency(const SaliencyMap& map, const RenderConfig& cfg) {
  check_config(cfg);
  if (map.values.rows() != 28 || map.values.cols() != 28)
    throw std::invalid_argument("saliency map must be 28x28");
  std::vector<std::uint8_t> bytes(784);
  for (int r = 0; r < 28; ++r)
    for (int c = 0; c < 28; ++c) bytes[static_cast<std::size_t>(r) * 28 + c] = to_byte(map.values(r, c));
  if (cfg.format == ImageFormat::svg) return gray_grid_svg(bytes, 28, 28, cfg.cell_size);
  std::string out = "P5\n28 28\n255\n";
  out.append(reinterpret_cast<const char*>(bytes.data()), bytes.size());
  return out;
}

void write_curves(const std::vector<TrainReport>& reports, std::ostream& out) {
  auto fmt6 = [](double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return std::string(buf);
  };
  out << "run_id,epoch,train_loss,train_acc,val_loss,val_acc\n";
  for (std::size_t run = 0; run < reports.size(); ++run) {
    const TrainReport& rep = reports[run];
    for (std::size_t e = 0; e < rep.train_loss.size(); ++e)
      out << run << ',' << e << ',' << fmt6(rep.train_loss[e]) << ',' << fmt6(rep.train_acc[e]) << ','
          << fmt6(rep.val_loss[e]) << ',' << fmt6(rep.val_acc[e]) << '\n';
  }
}

void write_curves(const std::vector<TrainReport>& reports, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_curves(reports, out);
}

}  // namespace radixnet
