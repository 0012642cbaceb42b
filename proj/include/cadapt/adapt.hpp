#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "cadapt/classifier.hpp"
#include "cadapt/errors.hpp"
#include "cadapt/simulator.hpp"
#include "cadapt/volume.hpp"

namespace cadapt {

/// Source of the classifier variances after each simulation step.
enum class VarianceMode {
  Residual,   // spread of the input image around the fitted centroids
  Simulated,  // refit from the simulated training images
};

VarianceMode parse_variance_mode(std::string_view name);
std::string_view to_string(VarianceMode mode) noexcept;

struct AdaptConfig {
  std::size_t max_iters = 50;
  double convergence_frac = 1e-4;
  /// Width used when training maps are derived from hard labels.
  double soften_sigma = 1.0;
  VarianceMode variance_mode = VarianceMode::Simulated;
  /// Std of a fixed Gaussian noise field added to every simulated training
  /// image; 0 leaves the simulation noiseless.
  double add_noise_std = 0.0;
  std::uint64_t noise_seed = 0;
  /// Consecutive increases of the change fraction that abort the loop.
  std::size_t divergence_patience = 3;

  void validate() const;
};

struct IterationRecord {
  std::size_t iteration = 0;  // 1-based
  double changed_frac = 0.0;
  SimulationParams theta;
};

struct Segmentation {
  ProbMap prob;
  LabelImage labels;
};

struct AdaptResult {
  ProbMap prob;
  LabelImage labels;
  SimulationParams theta;
  GaussianClassParams classifier;
  /// Simulated training images that produced `classifier`.
  std::vector<ScalarImage> simulated_training;
  std::size_t iterations_used = 0;
  std::vector<double> change_fractions;
  bool converged = false;
  /// Set when the divergence guard fired; the returned state is then the
  /// iterate with the smallest recorded change fraction.
  bool diverged = false;
  /// Set when the loop stopped on an error (e.g. EmptyClass); the returned
  /// state is the last valid one.
  std::optional<Errc> failure;
};

/// Fit on the training pairs, classify the input, take the argmax.
Segmentation segment_standard(std::span<const TrainingPair> training, const ScalarImage& input);

/// Alternates classification of `input` with least-squares centroid fitting
/// and re-simulation of the training images from their fixed probability
/// maps, until fewer than cfg.convergence_frac of the voxels change label.
///
/// The first classification uses the unmodified training data. Each
/// iteration records the fraction of voxels whose label changed relative to
/// the previous classification, so iterations_used always equals
/// change_fractions.size().
AdaptResult adapt_segment(std::span<const TrainingPair> training, const ScalarImage& input,
                          const AdaptConfig& cfg,
                          const std::function<void(const IterationRecord&)>& on_iteration = {});

/// Fraction of voxels whose labels differ.
double label_change_fraction(const LabelImage& a, const LabelImage& b);

}  // namespace cadapt
