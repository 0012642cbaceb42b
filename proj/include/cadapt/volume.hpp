#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace cadapt {

/// Grid extents, row-major with the last dimension varying fastest.
using Dims = std::vector<std::size_t>;
using Label = std::uint16_t;

std::size_t voxel_count(const Dims& dims) noexcept;

/// Tolerance on the per-voxel probability sum for in-memory maps.
inline constexpr double kProbSumTolerance = 1e-9;
/// Looser tolerance accepted when reading CAP1 files.
inline constexpr double kProbSumLoadTolerance = 1e-6;

/// Dense 2-D or 3-D grid of finite real intensities.
class ScalarImage {
 public:
  ScalarImage() = default;
  ScalarImage(Dims dims, double fill);
  ScalarImage(Dims dims, std::vector<double> data);

  const Dims& dims() const noexcept { return dims_; }
  std::size_t size() const noexcept { return data_.size(); }
  std::span<const double> data() const noexcept { return data_; }
  double operator[](std::size_t j) const noexcept { return data_[j]; }

  friend bool operator==(const ScalarImage&, const ScalarImage&) = default;

 private:
  Dims dims_;
  std::vector<double> data_;
};

/// Per-voxel probability vector over K classes. Storage is voxel-major with
/// the class index varying fastest, matching the CAP1 layout.
class ProbMap {
 public:
  ProbMap() = default;
  ProbMap(Dims dims, std::size_t num_classes, std::vector<double> data,
          double sum_tolerance = kProbSumTolerance);

  const Dims& dims() const noexcept { return dims_; }
  std::size_t num_classes() const noexcept { return num_classes_; }
  std::size_t num_voxels() const noexcept { return voxel_count(dims_); }
  std::span<const double> data() const noexcept { return data_; }

  double operator()(std::size_t voxel, std::size_t k) const noexcept {
    return data_[voxel * num_classes_ + k];
  }
  std::span<const double> voxel(std::size_t j) const noexcept {
    return std::span<const double>(data_).subspan(j * num_classes_, num_classes_);
  }

  friend bool operator==(const ProbMap&, const ProbMap&) = default;

 private:
  Dims dims_;
  std::size_t num_classes_ = 0;
  std::vector<double> data_;
};

/// Hard class assignment per voxel; every entry is below num_classes().
class LabelImage {
 public:
  LabelImage() = default;
  LabelImage(Dims dims, std::size_t num_classes, std::vector<Label> data);

  const Dims& dims() const noexcept { return dims_; }
  std::size_t num_classes() const noexcept { return num_classes_; }
  std::size_t size() const noexcept { return data_.size(); }
  std::span<const Label> data() const noexcept { return data_; }
  Label operator[](std::size_t j) const noexcept { return data_[j]; }

  friend bool operator==(const LabelImage&, const LabelImage&) = default;

 private:
  Dims dims_;
  std::size_t num_classes_ = 0;
  std::vector<Label> data_;
};

/// Throws DimensionError unless `dims` is 2-D or 3-D with nonzero extents.
void check_dims(const Dims& dims);

/// Index of the most probable class per voxel; ties go to the lowest index.
LabelImage argmax_labels(const ProbMap& p);

/// One-hot encoding of a label image.
ProbMap one_hot(const LabelImage& labels);

void save_volume(const ScalarImage& img, const std::filesystem::path& path);
ScalarImage load_volume(const std::filesystem::path& path);

void save_probmap(const ProbMap& p, const std::filesystem::path& path);
ProbMap load_probmap(const std::filesystem::path& path);

/// Label images are stored as CAV1 volumes holding integral values.
void save_labels(const LabelImage& labels, const std::filesystem::path& path);
/// `num_classes` of 0 infers K as max label + 1 (at least 2).
LabelImage load_labels(const std::filesystem::path& path, std::size_t num_classes = 0);

/// 16-bit binary PGM of a 2-D image, min mapped to 0 and max to 65535.
void export_pgm(const ScalarImage& img, const std::filesystem::path& path);

}  // namespace cadapt
