#include "cadapt/sweep.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <numeric>
#include <thread>

#include "cadapt/errors.hpp"
#include "cadapt/metrics.hpp"

namespace cadapt {

void SweepSpec::validate() const {
  if (!(lo < hi)) throw Error(Errc::InvalidArgument, "sweep requires lo < hi");
  if (!(step > 0.0)) throw Error(Errc::InvalidArgument, "sweep step must be positive");
  if (trials < 1) throw Error(Errc::InvalidArgument, "sweep needs at least one trial");
  if (center_class >= phantom.num_classes()) {
    throw Error(Errc::InvalidArgument, "center class outside the phantom's class range");
  }
  adapt.validate();
}

std::vector<double> SweepSpec::means() const {
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = lo + static_cast<double>(i) * step;
  return out;
}

TrialStats summarize(std::vector<double> values) {
  TrialStats s;
  const auto n = static_cast<double>(values.size());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std_error = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  }
  s.values = std::move(values);
  return s;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
  auto mix = [](std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  };
  return mix(mix(mix(base) ^ a) ^ b);
}

SweepPoint run_sweep_point(const SweepSpec& spec, double center_mean) {
  std::vector<double> ideal;
  std::vector<double> fixed;
  std::vector<double> adaptive;
  // Test seeds depend on the center mean; training seeds only on the trial,
  // so ideal and fixed coincide exactly at center_mean == train_mean.
  const auto point_key = static_cast<std::uint64_t>(std::llround(center_mean * 1e6));
  for (std::size_t t = 0; t < spec.trials; ++t) {
    PhantomSpec test_spec = spec.phantom;
    test_spec.class_means[spec.center_class] = center_mean;
    test_spec.seed = derive_seed(spec.phantom.seed, point_key, 2 * t);
    const Phantom test = make_phantom(test_spec);

    PhantomSpec ideal_spec = test_spec;
    ideal_spec.seed = derive_seed(spec.phantom.seed, ~0ull, 2 * t + 1);
    const Phantom ideal_train = make_phantom(ideal_spec);

    PhantomSpec fixed_spec = spec.phantom;
    fixed_spec.class_means[spec.center_class] = spec.train_mean;
    fixed_spec.seed = ideal_spec.seed;
    const Phantom fixed_train = make_phantom(fixed_spec);

    const std::vector<TrainingPair> ideal_set{{ideal_train.image, ideal_train.truth}};
    const std::vector<TrainingPair> fixed_set{{fixed_train.image, fixed_train.truth}};

    ideal.push_back(classification_error(segment_standard(ideal_set, test.image).labels, test.labels));
    fixed.push_back(classification_error(segment_standard(fixed_set, test.image).labels, test.labels));
    AdaptConfig cfg = spec.adapt;
    if (spec.match_training_noise) cfg.add_noise_std = spec.phantom.noise_std;
    cfg.noise_seed = derive_seed(cfg.noise_seed, point_key, 2 * t + 1);
    adaptive.push_back(classification_error(adapt_segment(fixed_set, test.image, cfg).labels, test.labels));
  }
  return SweepPoint{center_mean, summarize(std::move(ideal)), summarize(std::move(fixed)),
                    summarize(std::move(adaptive))};
}

std::vector<SweepPoint> run_sweep(const SweepSpec& spec, unsigned jobs) {
  spec.validate();
  const auto means = spec.means();
  std::vector<SweepPoint> points(means.size());
  if (jobs <= 1) {
    for (std::size_t i = 0; i < means.size(); ++i) points[i] = run_sweep_point(spec, means[i]);
    return points;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (std::size_t i = next++; i < means.size(); i = next++) {
      try {
        points[i] = run_sweep_point(spec, means[i]);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::jthread> pool;
  for (unsigned w = 0; w < jobs; ++w) pool.emplace_back(worker);
  pool.clear();
  if (failure) std::rethrow_exception(failure);
  return points;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepPoint>& points) {
  out << "mean,ideal,fixed,adaptive\n";
  char line[128];
  for (const auto& p : points) {
    std::snprintf(line, sizeof line, "%.6g,%.6g,%.6g,%.6g\n", p.mean, p.ideal.mean, p.fixed.mean,
                  p.adaptive.mean);
    out << line;
  }
}

}  // namespace cadapt
