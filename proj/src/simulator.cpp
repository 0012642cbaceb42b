#include "cadapt/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "cadapt/classifier.hpp"
#include "cadapt/errors.hpp"
#include "cadapt/phantom.hpp"

namespace cadapt {

namespace {

void check_finite_centroids(const SimulationParams& theta) {
  for (double c : theta.centroids) {
    if (!std::isfinite(c)) throw Error(Errc::NonFinite, "non-finite centroid");
  }
}

void check_pair(const ProbMap& p, const ScalarImage& img) {
  if (p.dims() != img.dims()) throw Error(Errc::DimensionError, "probability map and image dims differ");
}

}  // namespace

ScalarImage simulate(const ProbMap& p, const SimulationParams& theta) {
  const std::size_t K = p.num_classes();
  if (theta.num_classes() != K) {
    throw Error(Errc::ClassCountError, "map has " + std::to_string(K) + " classes but theta has " +
                                           std::to_string(theta.num_classes()));
  }
  check_finite_centroids(theta);
  std::vector<double> y(p.num_voxels());
  for (std::size_t j = 0; j < y.size(); ++j) {
    const auto pj = p.voxel(j);
    double acc = 0.0;
    for (std::size_t k = 0; k < K; ++k) acc += pj[k] * theta.centroids[k];
    y[j] = acc;
  }
  return ScalarImage(p.dims(), std::move(y));
}

NormalEquations accumulate_normal_equations(const ProbMap& p, const ScalarImage& img) {
  check_pair(p, img);
  const std::size_t K = p.num_classes();
  NormalEquations eq;
  eq.num_classes = K;
  eq.gram.assign(K * K, 0.0);
  eq.rhs.assign(K, 0.0);
  eq.class_weight.assign(K, 0.0);
  for (std::size_t j = 0; j < img.size(); ++j) {
    const auto pj = p.voxel(j);
    const double x = img[j];
    for (std::size_t a = 0; a < K; ++a) {
      if (pj[a] == 0.0) continue;
      eq.class_weight[a] += pj[a];
      eq.rhs[a] += pj[a] * x;
      for (std::size_t b = a; b < K; ++b) eq.gram[a * K + b] += pj[a] * pj[b];
    }
  }
  for (std::size_t a = 0; a < K; ++a) {
    for (std::size_t b = 0; b < a; ++b) eq.gram[a * K + b] = eq.gram[b * K + a];
  }
  return eq;
}

CentroidSolve solve_normal_equations(const NormalEquations& eq) {
  const auto K = static_cast<Eigen::Index>(eq.num_classes);
  for (Eigen::Index k = 0; k < K; ++k) {
    if (!(eq.class_weight[static_cast<std::size_t>(k)] > 0.0)) {
      throw Error(Errc::EmptyClass, "class " + std::to_string(k) + " has zero total probability",
                  static_cast<int>(k));
    }
  }
  const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> gram(
      eq.gram.data(), K, K);
  const Eigen::Map<const Eigen::VectorXd> rhs(eq.rhs.data(), K);

  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();

  CentroidSolve out;
  out.condition = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  Eigen::VectorXd theta;
  if (out.condition <= kMaxGramCondition) {
    theta = gram.llt().solve(rhs);
  } else {
    const double lambda = kRidgeScale * gram.trace() / static_cast<double>(K);
    Eigen::MatrixXd ridge = gram;
    ridge.diagonal().array() += lambda;
    theta = ridge.llt().solve(rhs);
    out.regularized = true;
  }
  out.params.centroids.assign(theta.data(), theta.data() + K);
  return out;
}

SimulationParams estimate_centroids(const ProbMap& p, const ScalarImage& img) {
  return solve_normal_equations(accumulate_normal_equations(p, img)).params;
}

ProbMap soften_labels(const LabelImage& labels, std::size_t num_classes, double sigma) {
  if (num_classes < 2) throw Error(Errc::ClassCountError, "softening needs at least 2 classes");
  for (std::size_t j = 0; j < labels.size(); ++j) {
    if (labels[j] >= num_classes) {
      throw Error(Errc::LabelRangeError, "label " + std::to_string(labels[j]) + " at voxel " +
                                             std::to_string(j) + " is not below K=" +
                                             std::to_string(num_classes));
    }
  }
  const std::size_t n = labels.size();
  std::vector<double> out(n * num_classes, 0.0);
  std::vector<double> channel(n);
  for (std::size_t k = 0; k < num_classes; ++k) {
    for (std::size_t j = 0; j < n; ++j) channel[j] = labels[j] == k ? 1.0 : 0.0;
    blur_in_place(labels.dims(), channel, sigma);
    // Kernel rounding can push a saturated voxel one ulp past 1.
    for (std::size_t j = 0; j < n; ++j) out[j * num_classes + k] = std::min(channel[j], 1.0);
  }
  return ProbMap(labels.dims(), num_classes, std::move(out));
}

std::vector<double> refit_residual_variance(const ProbMap& p, const ScalarImage& img,
                                            const SimulationParams& theta) {
  check_pair(p, img);
  const std::size_t K = p.num_classes();
  if (theta.num_classes() != K) throw Error(Errc::ClassCountError, "theta and map class counts differ");
  std::vector<double> weight(K, 0.0);
  std::vector<double> spread(K, 0.0);
  for (std::size_t j = 0; j < img.size(); ++j) {
    const auto pj = p.voxel(j);
    for (std::size_t k = 0; k < K; ++k) {
      const double d = img[j] - theta.centroids[k];
      weight[k] += pj[k];
      spread[k] += pj[k] * d * d;
    }
  }
  std::vector<double> variances(K);
  for (std::size_t k = 0; k < K; ++k) {
    if (!(weight[k] > 0.0)) {
      throw Error(Errc::EmptyClass, "class " + std::to_string(k) + " has zero total probability",
                  static_cast<int>(k));
    }
    variances[k] = std::max(spread[k] / weight[k], kVarianceFloor);
  }
  return variances;
}

}  // namespace cadapt
