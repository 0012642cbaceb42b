#pragma once

#include <vector>

#include "cadapt/volume.hpp"

namespace cadapt {

/// Intensity assigned to each class by the partial-volume simulation.
struct SimulationParams {
  std::vector<double> centroids;

  std::size_t num_classes() const noexcept { return centroids.size(); }

  friend bool operator==(const SimulationParams&, const SimulationParams&) = default;
};

/// Normal equations of min ||x - P theta||^2, accumulated without forming P.
struct NormalEquations {
  std::size_t num_classes = 0;
  std::vector<double> gram;          // P^T P, K x K row-major
  std::vector<double> rhs;           // P^T x
  std::vector<double> class_weight;  // column sums of P
};

/// Ridge is applied when P^T P is singular or its condition estimate exceeds this.
inline constexpr double kMaxGramCondition = 1e12;
inline constexpr double kRidgeScale = 1e-8;

struct CentroidSolve {
  SimulationParams params;
  bool regularized = false;
  double condition = 0.0;  // eigenvalue ratio of P^T P; infinity when singular
};

/// y_j = sum_k p_jk c_k. Noiseless.
ScalarImage simulate(const ProbMap& p, const SimulationParams& theta);

/// Single pass over voxels in raster order.
NormalEquations accumulate_normal_equations(const ProbMap& p, const ScalarImage& img);

/// Solves (P^T P) theta = P^T x. Falls back to (P^T P + lambda I) theta = P^T x
/// with lambda = 1e-8 trace(P^T P) / K when the system is singular or
/// ill-conditioned. Throws EmptyClass if a class carries no probability mass.
CentroidSolve solve_normal_equations(const NormalEquations& eq);

/// Least-squares centroids of `img` under the mixing matrix `p`.
SimulationParams estimate_centroids(const ProbMap& p, const ScalarImage& img);

/// One-hot encodes `labels` into K channels and blurs each channel with the
/// shared Gaussian kernel under replicate boundaries. sigma == 0 returns the
/// exact one-hot map.
ProbMap soften_labels(const LabelImage& labels, std::size_t num_classes, double sigma);

/// sigma_k^2 = sum_j p_jk (x_j - c_k)^2 / sum_j p_jk, floored at kVarianceFloor.
std::vector<double> refit_residual_variance(const ProbMap& p, const ScalarImage& img,
                                            const SimulationParams& theta);

}  // namespace cadapt
