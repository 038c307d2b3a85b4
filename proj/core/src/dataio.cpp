#include "radixnet/dataio.hpp"

#include <cstdlib>
#include <fstream>

#include <zlib.h>

#include "radixnet/rng.hpp"

namespace radixnet {

namespace {

constexpr std::uint32_t kImagesMagic = 0x00000803;
constexpr std::uint32_t kLabelsMagic = 0x00000801;

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IdxError(IdxError::Kind::io, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IdxError(IdxError::Kind::io, "read failure on " + path.string());
  return bytes;
}

std::vector<std::uint8_t> gunzip(const std::vector<std::uint8_t>& compressed, const std::string& name) {
  z_stream strm{};
  // 32 + MAX_WBITS: accept either zlib or gzip framing
  if (inflateInit2(&strm, 32 + MAX_WBITS) != Z_OK)
    throw IdxError(IdxError::Kind::io, "zlib init failure for " + name);
  std::vector<std::uint8_t> out;
  std::vector<std::uint8_t> chunk(1 << 16);
  strm.next_in = const_cast<Bytef*>(compressed.data());
  strm.avail_in = static_cast<uInt>(compressed.size());
  int rc = Z_OK;
  do {
    strm.next_out = chunk.data();
    strm.avail_out = static_cast<uInt>(chunk.size());
    rc = inflate(&strm, Z_NO_FLUSH);
    if (rc != Z_OK && rc != Z_STREAM_END) {
      inflateEnd(&strm);
      throw IdxError(IdxError::Kind::io, "corrupt gzip stream in " + name);
    }
    out.insert(out.end(), chunk.data(), chunk.data() + (chunk.size() - strm.avail_out));
  } while (rc != Z_STREAM_END);
  inflateEnd(&strm);
  return out;
}

std::vector<std::uint8_t> read_maybe_gzipped(const std::filesystem::path& path) {
  std::vector<std::uint8_t> bytes = read_file(path);
  if (bytes.size() >= 2 && bytes[0] == 0x1f && bytes[1] == 0x8b) return gunzip(bytes, path.string());
  return bytes;
}

std::uint32_t read_be32(const std::vector<std::uint8_t>& bytes, std::size_t offset, const std::string& name) {
  if (offset + 4 > bytes.size())
    throw IdxError(IdxError::Kind::truncated, name + ": header cut short at byte " + std::to_string(offset));
  return (std::uint32_t{bytes[offset]} << 24) | (std::uint32_t{bytes[offset + 1]} << 16) |
         (std::uint32_t{bytes[offset + 2]} << 8) | std::uint32_t{bytes[offset + 3]};
}

}  // namespace

Dataset load_idx(const std::filesystem::path& images_path, const std::filesystem::path& labels_path,
                 const std::string& split_name) {
  std::vector<std::uint8_t> img = read_maybe_gzipped(images_path);
  std::vector<std::uint8_t> lab = read_maybe_gzipped(labels_path);
  const std::string img_name = images_path.filename().string();
  const std::string lab_name = labels_path.filename().string();

  const std::uint32_t img_magic = read_be32(img, 0, img_name);
  if (img_magic != kImagesMagic)
    throw IdxError(IdxError::Kind::bad_magic,
                   img_name + ": magic " + std::to_string(img_magic) + " is not an IDX image file");
  const std::uint32_t lab_magic = read_be32(lab, 0, lab_name);
  if (lab_magic != kLabelsMagic)
    throw IdxError(IdxError::Kind::bad_magic,
                   lab_name + ": magic " + std::to_string(lab_magic) + " is not an IDX label file");

  const std::uint64_t n_img = read_be32(img, 4, img_name);
  const std::uint64_t rows = read_be32(img, 8, img_name);
  const std::uint64_t cols = read_be32(img, 12, img_name);
  const std::uint64_t n_lab = read_be32(lab, 4, lab_name);

  if (img.size() != 16 + n_img * rows * cols)
    throw IdxError(IdxError::Kind::truncated, img_name + ": payload is " + std::to_string(img.size() - 16) +
                                                  " bytes, header promises " +
                                                  std::to_string(n_img * rows * cols));
  if (lab.size() != 8 + n_lab)
    throw IdxError(IdxError::Kind::truncated, lab_name + ": payload is " + std::to_string(lab.size() - 8) +
                                                  " bytes, header promises " + std::to_string(n_lab));
  if (n_img != n_lab)
    throw IdxError(IdxError::Kind::count_mismatch, img_name + " has " + std::to_string(n_img) +
                                                       " samples but " + lab_name + " has " +
                                                       std::to_string(n_lab));

  Dataset ds;
  ds.split_name = split_name;
  ds.images.resize(static_cast<Eigen::Index>(n_img), static_cast<Eigen::Index>(rows * cols));
  const std::uint8_t* px = img.data() + 16;
  for (Eigen::Index i = 0; i < ds.images.size(); ++i) ds.images.data()[i] = px[i] / 255.0;
  ds.labels.resize(n_lab);
  for (std::size_t i = 0; i < n_lab; ++i) {
    const std::uint8_t l = lab[8 + i];
    if (l > 9)
      throw IdxError(IdxError::Kind::bad_label,
                     lab_name + ": label " + std::to_string(l) + " at sample " + std::to_string(i));
    ds.labels[i] = l;
  }
  return ds;
}

Dataset load_mnist_split(const std::filesystem::path& dir, const std::string& split) {
  std::string img_base, lab_base;
  if (split == "train") {
    img_base = "train-images-idx3-ubyte";
    lab_base = "train-labels-idx1-ubyte";
  } else if (split == "test") {
    img_base = "t10k-images-idx3-ubyte";
    lab_base = "t10k-labels-idx1-ubyte";
  } else {
    throw IdxError(IdxError::Kind::io, "unknown split '" + split + "' (expected train or test)");
  }
  auto resolve = [&](const std::string& base) -> std::filesystem::path {
    for (const char* suffix : {"", ".gz"}) {
      std::filesystem::path p = dir / (base + suffix);
      if (std::filesystem::exists(p)) return p;
    }
    throw IdxError(IdxError::Kind::io,
                   "missing " + (dir / base).string() + " (or .gz); point RADIXNET_DATA_DIR or "
                   "--data-dir at a directory with the four MNIST IDX files");
  };
  return load_idx(resolve(img_base), resolve(lab_base), split);
}

std::filesystem::path default_data_dir() {
  if (const char* env = std::getenv("RADIXNET_DATA_DIR"); env && *env) return env;
  return "data";
}

std::vector<int> epoch_permutation(int n, const BatchPlan& plan, int epoch) {
  return random_permutation(n, mix_seed(plan.seed, static_cast<std::uint64_t>(epoch)));
}

Matrix one_hot(const std::vector<int>& labels, int num_classes) {
  Matrix targets = Matrix::Zero(static_cast<Eigen::Index>(labels.size()), num_classes);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= num_classes)
      throw IdxError(IdxError::Kind::bad_label,
                     "label " + std::to_string(labels[i]) + " outside 0.." + std::to_string(num_classes - 1));
    targets(static_cast<Eigen::Index>(i), labels[i]) = 1.0;
  }
  return targets;
}

BatchSequence::BatchSequence(const Dataset& data, const BatchPlan& plan, int epoch, int num_classes)
    : data_(&data), batch_size_(plan.batch_size), num_classes_(num_classes) {
  if (plan.batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  perm_ = epoch_permutation(data.count(), plan, epoch);
}

int BatchSequence::size() const {
  return (data_->count() + batch_size_ - 1) / batch_size_;
}

Batch BatchSequence::batch(int b) const {
  const int n = data_->count();
  const int lo = b * batch_size_;
  if (b < 0 || lo >= n) throw std::out_of_range("batch index out of range");
  const int hi = std::min(lo + batch_size_, n);
  Batch out;
  out.inputs.resize(hi - lo, data_->images.cols());
  std::vector<int> labels(static_cast<std::size_t>(hi - lo));
  for (int i = lo; i < hi; ++i) {
    const int src = perm_[static_cast<std::size_t>(i)];
    out.inputs.row(i - lo) = data_->images.row(src);
    labels[static_cast<std::size_t>(i - lo)] = data_->labels[static_cast<std::size_t>(src)];
  }
  out.targets = one_hot(labels, num_classes_);
  return out;
}

}  // namespace radixnet
