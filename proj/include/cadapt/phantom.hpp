#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "cadapt/volume.hpp"

namespace cadapt {

/// Normalized Gaussian taps exp(-t^2 / 2 sigma^2) for t in [-ceil(3 sigma), ceil(3 sigma)].
/// sigma == 0 yields the identity kernel {1}.
std::vector<double> gaussian_kernel_1d(double sigma);

/// Separable Gaussian convolution of a raw row-major buffer along every
/// axis, clamping out-of-range samples to the nearest edge voxel.
void blur_in_place(const Dims& dims, std::vector<double>& values, double sigma);

ScalarImage blur(const ScalarImage& img, double sigma);

/// Seeded standard-normal source: mt19937_64 feeding a Box-Muller transform.
/// The sequence depends only on the seed.
class NormalSampler {
 public:
  explicit NormalSampler(std::uint64_t seed) : engine_(seed) {}

  double operator()();

 private:
  double uniform_open();  // (0, 1]

  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

enum class Geometry { NestedSquares, NestedDisks };

Geometry parse_geometry(std::string_view name);
std::string_view to_string(Geometry g) noexcept;

struct PhantomSpec {
  Dims dims{128, 128};
  std::vector<double> class_means{0.0, 5.0, 10.0};
  double blur_sigma = 1.0;
  double noise_std = 0.5;
  Geometry geometry = Geometry::NestedSquares;
  std::uint64_t seed = 0;

  std::size_t num_classes() const noexcept { return class_means.size(); }
};

struct Phantom {
  ScalarImage image;  // blurred piecewise-constant image plus noise
  LabelImage labels;  // hard geometry before blurring
  ProbMap truth;      // blurred one-hot geometry (partial-volume fractions)
};

/// Hard K-class nested geometry; class 0 is outermost.
LabelImage phantom_geometry(const Dims& dims, std::size_t num_classes, Geometry geometry);

Phantom make_phantom(const PhantomSpec& spec);

}  // namespace cadapt
