#include "cadapt/adapt.hpp"

#include <cmath>
#include <string>

#include "cadapt/phantom.hpp"

namespace cadapt {

namespace {

void check_training(std::span<const TrainingPair> training) {
  if (training.empty()) throw Error(Errc::InvalidArgument, "training set is empty");
  const std::size_t K = training.front().prob.num_classes();
  for (const auto& pair : training) {
    if (pair.prob.num_classes() != K) {
      throw Error(Errc::ClassCountError, "training maps disagree on class count");
    }
    if (pair.image.dims() != pair.prob.dims()) {
      throw Error(Errc::DimensionError, "training image and map dims differ");
    }
  }
}

struct LoopState {
  ProbMap prob;
  LabelImage labels;
  SimulationParams theta;
  GaussianClassParams classifier;
  std::vector<ScalarImage> simulated;
};

}  // namespace

VarianceMode parse_variance_mode(std::string_view name) {
  if (name == "residual") return VarianceMode::Residual;
  if (name == "simulated") return VarianceMode::Simulated;
  throw Error(Errc::InvalidArgument, "unknown variance mode '" + std::string(name) + "'");
}

std::string_view to_string(VarianceMode mode) noexcept {
  return mode == VarianceMode::Residual ? "residual" : "simulated";
}

void AdaptConfig::validate() const {
  if (max_iters < 1) throw Error(Errc::InvalidArgument, "max_iters must be at least 1");
  if (!(convergence_frac > 0.0 && convergence_frac < 1.0)) {
    throw Error(Errc::InvalidArgument, "convergence_frac must lie in (0, 1)");
  }
  if (!(soften_sigma >= 0.0) || !std::isfinite(soften_sigma)) {
    throw Error(Errc::InvalidArgument, "soften_sigma must be non-negative");
  }
  if (!(add_noise_std >= 0.0) || !std::isfinite(add_noise_std)) {
    throw Error(Errc::InvalidArgument, "add_noise_std must be non-negative");
  }
  if (divergence_patience < 1) throw Error(Errc::InvalidArgument, "divergence_patience must be at least 1");
}

double label_change_fraction(const LabelImage& a, const LabelImage& b) {
  if (a.dims() != b.dims()) throw Error(Errc::DimensionError, "label images differ in dims");
  std::size_t changed = 0;
  for (std::size_t j = 0; j < a.size(); ++j) changed += a[j] != b[j];
  return static_cast<double>(changed) / static_cast<double>(a.size());
}

Segmentation segment_standard(std::span<const TrainingPair> training, const ScalarImage& input) {
  check_training(training);
  ProbMap prob = classify(input, fit_classifier(training));
  LabelImage labels = argmax_labels(prob);
  return {std::move(prob), std::move(labels)};
}

AdaptResult adapt_segment(std::span<const TrainingPair> training, const ScalarImage& input,
                          const AdaptConfig& cfg,
                          const std::function<void(const IterationRecord&)>& on_iteration) {
  cfg.validate();
  check_training(training);
  std::vector<ProbMap> maps;
  maps.reserve(training.size());
  for (const auto& pair : training) maps.push_back(pair.prob);

  LoopState state;
  state.classifier = fit_classifier(training);
  state.prob = classify(input, state.classifier);
  state.labels = argmax_labels(state.prob);
  state.theta.centroids = state.classifier.means;
  for (const auto& pair : training) state.simulated.push_back(pair.image);

  // One noise field per training image, drawn once, so iterations differ
  // only through theta.
  std::vector<std::vector<double>> noise_fields;
  if (cfg.add_noise_std > 0.0) {
    NormalSampler normal(cfg.noise_seed);
    for (const auto& pair : training) {
      std::vector<double> field(pair.image.size());
      for (auto& v : field) v = cfg.add_noise_std * normal();
      noise_fields.push_back(std::move(field));
    }
  }

  AdaptResult result;
  LoopState best;
  double best_frac = 0.0;
  std::size_t rising = 0;

  for (std::size_t it = 1; it <= cfg.max_iters; ++it) {
    LoopState next;
    try {
      next.theta = estimate_centroids(state.prob, input);

      next.simulated.reserve(training.size());
      for (std::size_t t = 0; t < training.size(); ++t) {
        ScalarImage sim = simulate(training[t].prob, next.theta);
        if (!noise_fields.empty()) {
          std::vector<double> noisy(sim.data().begin(), sim.data().end());
          for (std::size_t j = 0; j < noisy.size(); ++j) noisy[j] += noise_fields[t][j];
          sim = ScalarImage(sim.dims(), std::move(noisy));
        }
        next.simulated.push_back(std::move(sim));
      }

      next.classifier = fit_classifier(next.simulated, maps);
      if (cfg.variance_mode == VarianceMode::Residual) {
        next.classifier.variances = refit_residual_variance(state.prob, input, next.theta);
      }
    } catch (const Error& e) {
      if (e.code() != Errc::EmptyClass) throw;
      result.failure = e.code();
      break;
    }

    next.prob = classify(input, next.classifier);
    next.labels = argmax_labels(next.prob);
    const double frac = label_change_fraction(next.labels, state.labels);

    result.change_fractions.push_back(frac);
    if (on_iteration) on_iteration(IterationRecord{it, frac, next.theta});

    const auto& fracs = result.change_fractions;
    rising = fracs.size() > 1 && frac > fracs[fracs.size() - 2] ? rising + 1 : 0;
    state = std::move(next);

    if (frac < cfg.convergence_frac) {
      result.converged = true;
      break;
    }
    if (it == 1 || frac < best_frac) {
      best = state;
      best_frac = frac;
    }
    if (rising >= cfg.divergence_patience) {
      result.diverged = true;
      state = std::move(best);
      break;
    }
  }

  result.iterations_used = result.change_fractions.size();
  result.prob = std::move(state.prob);
  result.labels = std::move(state.labels);
  result.theta = std::move(state.theta);
  result.classifier = std::move(state.classifier);
  result.simulated_training = std::move(state.simulated);
  return result;
}

}  // namespace cadapt
