#pragma once

#include <cstdint>
#include <ostream>
#include <vector>

#include "cadapt/adapt.hpp"
#include "cadapt/phantom.hpp"

namespace cadapt {

/// Contrast sweep: the mean of one class is moved across [lo, hi] while the
/// training data keeps it at `train_mean`.
struct SweepSpec {
  double lo = 2.0;
  double hi = 8.5;
  double step = 0.25;
  double train_mean = 5.0;
  std::size_t trials = 5;
  std::size_t center_class = 1;
  /// Geometry, class means, blur and noise shared by every phantom; its seed
  /// is the base from which all per-trial seeds are derived.
  PhantomSpec phantom;
  AdaptConfig adapt;
  /// Overrides adapt.add_noise_std with phantom.noise_std, so simulated
  /// training images carry the same noise level as the original ones.
  bool match_training_noise = true;

  void validate() const;
  std::vector<double> means() const;
};

struct TrialStats {
  std::vector<double> values;
  double mean = 0.0;
  double std_error = 0.0;  // sample std / sqrt(n); 0 for a single trial
};

struct SweepPoint {
  double mean = 0.0;
  TrialStats ideal;     // trained on a phantom with the test contrast
  TrialStats fixed;     // trained at train_mean, no adaptation
  TrialStats adaptive;  // trained at train_mean, adapted to the test image
};

TrialStats summarize(std::vector<double> values);

/// Deterministic per-trial seed derivation (SplitMix64 mixing).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b);

SweepPoint run_sweep_point(const SweepSpec& spec, double center_mean);

/// Points are returned in ascending-mean order; `jobs` > 1 evaluates points
/// on worker threads.
std::vector<SweepPoint> run_sweep(const SweepSpec& spec, unsigned jobs = 1);

/// Header `mean,ideal,fixed,adaptive`, LF endings, 6 significant digits.
void write_sweep_csv(std::ostream& out, const std::vector<SweepPoint>& points);

}  // namespace cadapt
