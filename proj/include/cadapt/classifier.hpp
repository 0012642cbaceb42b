#pragma once

#include <span>
#include <vector>

#include "cadapt/volume.hpp"

namespace cadapt {

/// Lower bound applied to every fitted class variance.
inline constexpr double kVarianceFloor = 1e-8;

/// Per-class intensity mean and variance of the Gaussian classifier.
struct GaussianClassParams {
  std::vector<double> means;
  std::vector<double> variances;

  std::size_t num_classes() const noexcept { return means.size(); }

  /// Throws unless K >= 2, sizes agree, values are finite and variances are
  /// at or above the floor.
  void validate() const;

  friend bool operator==(const GaussianClassParams&, const GaussianClassParams&) = default;
};

/// An intensity image with its (possibly soft) class map.
struct TrainingPair {
  ScalarImage image;
  ProbMap prob;
};

/// Probability-weighted population mean and variance of each class over
/// all training pairs. Hard labels are the one-hot special case.
GaussianClassParams fit_classifier(std::span<const ScalarImage> images, std::span<const ProbMap> probs);
GaussianClassParams fit_classifier(std::span<const TrainingPair> training);

/// Posterior class probabilities from normalized Gaussian likelihoods.
///
/// `priors` defaults to uniform when empty; otherwise it must hold K
/// positive weights. A voxel whose likelihoods all underflow to zero is
/// assigned entirely to the class minimizing (x - mu)^2 / var + log var.
ProbMap classify(const ScalarImage& img, const GaussianClassParams& params,
                 std::span<const double> priors = {});

}  // namespace cadapt
