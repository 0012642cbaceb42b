#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cadapt/volume.hpp"

namespace cadapt {

struct SegmentationReport {
  double classification_error = 0.0;
  std::vector<double> dice;                // per class
  std::vector<std::size_t> pred_volumes;   // voxel counts per class
  std::vector<std::size_t> truth_volumes;
};

/// Fraction of voxels whose labels differ.
double classification_error(const LabelImage& pred, const LabelImage& truth);

/// 2|A n B| / (|A| + |B|) for the class-k voxel sets; 1 when both are empty.
double dice(const LabelImage& pred, const LabelImage& truth, Label k);

std::vector<std::size_t> class_volumes(const LabelImage& labels, std::size_t num_classes);

/// |Va - Vb| / ((Va + Vb) / 2) * 100 with V the voxel count over `classes`.
/// Throws ZeroVolume when both counts are zero.
double volume_consistency(const LabelImage& a, const LabelImage& b, std::span<const Label> classes);

/// Report over max(K_pred, K_truth) classes.
SegmentationReport evaluate(const LabelImage& pred, const LabelImage& truth);

}  // namespace cadapt
