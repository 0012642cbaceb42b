#include "cadapt/volume.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <string>

#include "cadapt/errors.hpp"

namespace cadapt {

namespace {

constexpr std::array<char, 4> kVolumeMagic{'C', 'A', 'V', '1'};
constexpr std::array<char, 4> kProbMagic{'C', 'A', 'P', '1'};

std::string dims_string(const Dims& dims) {
  std::string s;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (i) s += 'x';
    s += std::to_string(dims[i]);
  }
  return s;
}

void check_finite(std::span<const double> values) {
  for (double v : values) {
    if (!std::isfinite(v)) throw Error(Errc::NonFinite, "non-finite value in image data");
  }
}

// Little-endian byte writer; the encoding is independent of host byte order.
class ByteWriter {
 public:
  void bytes(std::span<const char> b) { buf_.insert(buf_.end(), b.begin(), b.end()); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
  }
  void f64(double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<char>((bits >> (8 * i)) & 0xFFu));
  }
  void write_to(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::IoError, "cannot open for writing: " + path.string());
    out.write(buf_.data(), static_cast<std::streamsize>(buf_.size()));
    if (!out) throw Error(Errc::IoError, "write failed: " + path.string());
  }

 private:
  std::vector<char> buf_;
};

class ByteReader {
 public:
  explicit ByteReader(const std::filesystem::path& path) : path_(path.string()) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::IoError, "cannot open for reading: " + path_);
    buf_.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }

  void expect_magic(const std::array<char, 4>& magic) {
    need(4);
    if (!std::equal(magic.begin(), magic.end(), buf_.begin() + static_cast<std::ptrdiff_t>(pos_))) {
      throw Error(Errc::MagicMismatch,
                  "expected '" + std::string(magic.data(), 4) + "' header in " + path_);
    }
    pos_ += 4;
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(byte(pos_ + i)) << (8 * i);
    pos_ += 4;
    return v;
  }
  double f64() {
    need(8);
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(byte(pos_ + i)) << (8 * i);
    pos_ += 8;
    return std::bit_cast<double>(bits);
  }
  std::vector<double> f64_array(std::size_t n) {
    if (n > remaining() / 8) throw Error(Errc::Truncated, "payload shorter than header implies in " + path_);
    std::vector<double> out(n);
    for (auto& v : out) v = f64();
    return out;
  }
  Dims dims() {
    const std::uint32_t ndim = u32();
    if (ndim < 2 || ndim > 3) {
      throw Error(Errc::PayloadMismatch, "unsupported rank " + std::to_string(ndim) + " in " + path_);
    }
    Dims dims(ndim);
    for (auto& d : dims) {
      d = u32();
      if (d == 0) throw Error(Errc::PayloadMismatch, "zero extent in " + path_);
    }
    return dims;
  }
  void expect_end() const {
    if (pos_ != buf_.size()) {
      throw Error(Errc::PayloadMismatch, std::to_string(buf_.size() - pos_) +
                                             " trailing bytes after payload in " + path_);
    }
  }

 private:
  std::size_t remaining() const { return buf_.size() - pos_; }
  void need(std::size_t n) const {
    if (remaining() < n) throw Error(Errc::Truncated, "unexpected end of file in " + path_);
  }
  unsigned char byte(std::size_t i) const { return static_cast<unsigned char>(buf_[i]); }

  std::string path_;
  std::vector<char> buf_;
  std::size_t pos_ = 0;
};

void write_header(ByteWriter& w, const std::array<char, 4>& magic, const Dims& dims) {
  w.bytes(magic);
  w.u32(static_cast<std::uint32_t>(dims.size()));
  for (auto d : dims) w.u32(static_cast<std::uint32_t>(d));
}

}  // namespace

std::size_t voxel_count(const Dims& dims) noexcept {
  if (dims.empty()) return 0;
  std::size_t n = 1;
  for (auto d : dims) n *= d;
  return n;
}

void check_dims(const Dims& dims) {
  if (dims.size() < 2 || dims.size() > 3) {
    throw Error(Errc::DimensionError, "images must be 2-D or 3-D, got rank " + std::to_string(dims.size()));
  }
  for (auto d : dims) {
    if (d == 0) throw Error(Errc::DimensionError, "zero extent in dims " + dims_string(dims));
    if (d > std::numeric_limits<std::uint32_t>::max()) {
      throw Error(Errc::DimensionError, "extent exceeds 32 bits");
    }
  }
}

ScalarImage::ScalarImage(Dims dims, double fill) : ScalarImage(dims, std::vector<double>(voxel_count(dims), fill)) {}

ScalarImage::ScalarImage(Dims dims, std::vector<double> data) : dims_(std::move(dims)), data_(std::move(data)) {
  check_dims(dims_);
  if (data_.size() != voxel_count(dims_)) {
    throw Error(Errc::DimensionError, "data length " + std::to_string(data_.size()) +
                                          " does not match dims " + dims_string(dims_));
  }
  check_finite(data_);
}

ProbMap::ProbMap(Dims dims, std::size_t num_classes, std::vector<double> data, double sum_tolerance)
    : dims_(std::move(dims)), num_classes_(num_classes), data_(std::move(data)) {
  check_dims(dims_);
  if (num_classes_ < 2) throw Error(Errc::ClassCountError, "a probability map needs at least 2 classes");
  const std::size_t n = voxel_count(dims_);
  if (data_.size() != n * num_classes_) {
    throw Error(Errc::DimensionError, "probability data length does not match dims x K");
  }
  check_finite(data_);
  for (std::size_t j = 0; j < n; ++j) {
    double sum = 0.0;
    for (std::size_t k = 0; k < num_classes_; ++k) {
      const double v = data_[j * num_classes_ + k];
      if (v < 0.0 || v > 1.0) {
        throw Error(Errc::NotNormalized, "probability outside [0,1] at voxel " + std::to_string(j));
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > sum_tolerance) {
      throw Error(Errc::NotNormalized,
                  "voxel " + std::to_string(j) + " sums to " + std::to_string(sum));
    }
  }
}

LabelImage::LabelImage(Dims dims, std::size_t num_classes, std::vector<Label> data)
    : dims_(std::move(dims)), num_classes_(num_classes), data_(std::move(data)) {
  check_dims(dims_);
  if (num_classes_ < 1 || num_classes_ > 65535) {
    throw Error(Errc::ClassCountError, "class count out of range");
  }
  if (data_.size() != voxel_count(dims_)) {
    throw Error(Errc::DimensionError, "label data length does not match dims " + dims_string(dims_));
  }
  for (std::size_t j = 0; j < data_.size(); ++j) {
    if (data_[j] >= num_classes_) {
      throw Error(Errc::LabelRangeError, "label " + std::to_string(data_[j]) + " at voxel " +
                                             std::to_string(j) + " is not below K=" +
                                             std::to_string(num_classes_));
    }
  }
}

LabelImage argmax_labels(const ProbMap& p) {
  const std::size_t n = p.num_voxels();
  const std::size_t K = p.num_classes();
  std::vector<Label> out(n);
  for (std::size_t j = 0; j < n; ++j) {
    const auto v = p.voxel(j);
    std::size_t best = 0;
    for (std::size_t k = 1; k < K; ++k) {
      if (v[k] > v[best]) best = k;
    }
    out[j] = static_cast<Label>(best);
  }
  return LabelImage(p.dims(), K, std::move(out));
}

ProbMap one_hot(const LabelImage& labels) {
  const std::size_t K = labels.num_classes();
  std::vector<double> data(labels.size() * K, 0.0);
  for (std::size_t j = 0; j < labels.size(); ++j) data[j * K + labels[j]] = 1.0;
  return ProbMap(labels.dims(), K, std::move(data));
}

void save_volume(const ScalarImage& img, const std::filesystem::path& path) {
  ByteWriter w;
  write_header(w, kVolumeMagic, img.dims());
  for (double v : img.data()) w.f64(v);
  w.write_to(path);
}

ScalarImage load_volume(const std::filesystem::path& path) {
  ByteReader r(path);
  r.expect_magic(kVolumeMagic);
  Dims dims = r.dims();
  auto data = r.f64_array(voxel_count(dims));
  r.expect_end();
  return ScalarImage(std::move(dims), std::move(data));
}

void save_probmap(const ProbMap& p, const std::filesystem::path& path) {
  ByteWriter w;
  write_header(w, kProbMagic, p.dims());
  w.u32(static_cast<std::uint32_t>(p.num_classes()));
  for (double v : p.data()) w.f64(v);
  w.write_to(path);
}

ProbMap load_probmap(const std::filesystem::path& path) {
  ByteReader r(path);
  r.expect_magic(kProbMagic);
  Dims dims = r.dims();
  const std::uint32_t K = r.u32();
  if (K < 2) throw Error(Errc::PayloadMismatch, "class count below 2 in " + path.string());
  auto data = r.f64_array(voxel_count(dims) * K);
  r.expect_end();
  return ProbMap(std::move(dims), K, std::move(data), kProbSumLoadTolerance);
}

void save_labels(const LabelImage& labels, const std::filesystem::path& path) {
  std::vector<double> values(labels.data().begin(), labels.data().end());
  save_volume(ScalarImage(labels.dims(), std::move(values)), path);
}

LabelImage load_labels(const std::filesystem::path& path, std::size_t num_classes) {
  const ScalarImage img = load_volume(path);
  std::vector<Label> labels(img.size());
  std::size_t max_label = 0;
  for (std::size_t j = 0; j < img.size(); ++j) {
    const double v = img[j];
    if (v < 0.0 || v > 65534.0 || v != std::floor(v)) {
      throw Error(Errc::LabelRangeError, "non-integral label value at voxel " + std::to_string(j) +
                                             " in " + path.string());
    }
    labels[j] = static_cast<Label>(v);
    max_label = std::max<std::size_t>(max_label, labels[j]);
  }
  if (num_classes == 0) num_classes = std::max<std::size_t>(2, max_label + 1);
  return LabelImage(img.dims(), num_classes, std::move(labels));
}

void export_pgm(const ScalarImage& img, const std::filesystem::path& path) {
  if (img.dims().size() != 2) {
    throw Error(Errc::DimensionError, "PGM export requires a 2-D image");
  }
  const auto [lo_it, hi_it] = std::minmax_element(img.data().begin(), img.data().end());
  const double lo = *lo_it;
  const double range = *hi_it - lo;

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::IoError, "cannot open for writing: " + path.string());
  out << "P5\n" << img.dims()[1] << ' ' << img.dims()[0] << "\n65535\n";
  std::vector<char> bytes;
  bytes.reserve(img.size() * 2);
  for (double v : img.data()) {
    std::uint32_t s = 0;
    if (range > 0.0) {
      s = static_cast<std::uint32_t>(std::floor((v - lo) / range * 65535.0 + 0.5));
      s = std::min<std::uint32_t>(s, 65535);
    }
    bytes.push_back(static_cast<char>(s >> 8));
    bytes.push_back(static_cast<char>(s & 0xFFu));
  }
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(Errc::IoError, "write failed: " + path.string());
}

}  // namespace cadapt
