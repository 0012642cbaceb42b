#include "cadapt/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "cadapt/errors.hpp"

namespace cadapt {

void GaussianClassParams::validate() const {
  if (means.size() < 2) throw Error(Errc::ClassCountError, "classifier needs at least 2 classes");
  if (variances.size() != means.size()) {
    throw Error(Errc::ClassCountError, "means and variances differ in length");
  }
  for (std::size_t k = 0; k < means.size(); ++k) {
    if (!std::isfinite(means[k]) || !std::isfinite(variances[k])) {
      throw Error(Errc::NonFinite, "non-finite classifier parameter for class " + std::to_string(k));
    }
    if (variances[k] < kVarianceFloor) {
      throw Error(Errc::InvalidArgument, "variance of class " + std::to_string(k) + " below floor");
    }
  }
}

namespace {

// Shared by both fit_classifier overloads; `image(t)` and `prob(t)` return
// the t-th training pair without copying.
template <typename ImageAt, typename ProbAt>
GaussianClassParams fit_weighted_moments(std::size_t count, ImageAt image, ProbAt prob) {
  if (count == 0) throw Error(Errc::InvalidArgument, "training set is empty");
  const std::size_t K = prob(0).num_classes();
  for (std::size_t t = 0; t < count; ++t) {
    if (prob(t).num_classes() != K) {
      throw Error(Errc::ClassCountError, "training maps disagree on class count");
    }
    if (image(t).dims() != prob(t).dims()) {
      throw Error(Errc::DimensionError, "training pair " + std::to_string(t) + " has mismatched dims");
    }
  }

  std::vector<double> weight(K, 0.0);
  std::vector<double> moment(K, 0.0);
  for (std::size_t t = 0; t < count; ++t) {
    const ScalarImage& img = image(t);
    const ProbMap& p = prob(t);
    for (std::size_t j = 0; j < img.size(); ++j) {
      for (std::size_t k = 0; k < K; ++k) {
        weight[k] += p(j, k);
        moment[k] += p(j, k) * img[j];
      }
    }
  }

  GaussianClassParams params;
  params.means.resize(K);
  for (std::size_t k = 0; k < K; ++k) {
    if (!(weight[k] > 0.0)) {
      throw Error(Errc::EmptyClass, "class " + std::to_string(k) + " has zero total weight",
                  static_cast<int>(k));
    }
    params.means[k] = moment[k] / weight[k];
  }

  // Second pass around the fitted means.
  std::vector<double> spread(K, 0.0);
  for (std::size_t t = 0; t < count; ++t) {
    const ScalarImage& img = image(t);
    const ProbMap& p = prob(t);
    for (std::size_t j = 0; j < img.size(); ++j) {
      for (std::size_t k = 0; k < K; ++k) {
        const double d = img[j] - params.means[k];
        spread[k] += p(j, k) * d * d;
      }
    }
  }
  params.variances.resize(K);
  for (std::size_t k = 0; k < K; ++k) {
    params.variances[k] = std::max(spread[k] / weight[k], kVarianceFloor);
  }
  return params;
}

}  // namespace

GaussianClassParams fit_classifier(std::span<const ScalarImage> images, std::span<const ProbMap> probs) {
  if (images.size() != probs.size()) {
    throw Error(Errc::InvalidArgument, "training needs equally many images and probability maps");
  }
  return fit_weighted_moments(
      images.size(), [&](std::size_t t) -> const ScalarImage& { return images[t]; },
      [&](std::size_t t) -> const ProbMap& { return probs[t]; });
}

GaussianClassParams fit_classifier(std::span<const TrainingPair> training) {
  return fit_weighted_moments(
      training.size(), [&](std::size_t t) -> const ScalarImage& { return training[t].image; },
      [&](std::size_t t) -> const ProbMap& { return training[t].prob; });
}

ProbMap classify(const ScalarImage& img, const GaussianClassParams& params, std::span<const double> priors) {
  params.validate();
  const std::size_t K = params.num_classes();
  if (!priors.empty()) {
    if (priors.size() != K) throw Error(Errc::ClassCountError, "prior count differs from class count");
    for (double w : priors) {
      if (!(w > 0.0) || !std::isfinite(w)) throw Error(Errc::InvalidArgument, "priors must be positive");
    }
  }

  std::vector<double> norm(K);
  for (std::size_t k = 0; k < K; ++k) {
    norm[k] = 1.0 / std::sqrt(2.0 * std::numbers::pi * params.variances[k]);
    if (!priors.empty()) norm[k] *= priors[k];
  }

  std::vector<double> out(img.size() * K);
  for (std::size_t j = 0; j < img.size(); ++j) {
    const double x = img[j];
    double* row = out.data() + j * K;
    double sum = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      const double d = x - params.means[k];
      row[k] = norm[k] * std::exp(-d * d / (2.0 * params.variances[k]));
      sum += row[k];
    }
    if (sum > 0.0) {
      for (std::size_t k = 0; k < K; ++k) row[k] /= sum;
      continue;
    }
    std::size_t best = 0;
    double best_score = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      const double d = x - params.means[k];
      double score = d * d / params.variances[k] + std::log(params.variances[k]);
      if (!priors.empty()) score -= 2.0 * std::log(priors[k]);
      if (k == 0 || score < best_score) {
        best = k;
        best_score = score;
      }
    }
    for (std::size_t k = 0; k < K; ++k) row[k] = k == best ? 1.0 : 0.0;
  }
  return ProbMap(img.dims(), K, std::move(out));
}

}  // namespace cadapt
