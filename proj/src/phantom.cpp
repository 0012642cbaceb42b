#include "cadapt/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "cadapt/errors.hpp"
#include "cadapt/simulator.hpp"

namespace cadapt {

std::vector<double> gaussian_kernel_1d(double sigma) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw Error(Errc::InvalidArgument, "blur sigma must be finite and non-negative");
  }
  if (sigma == 0.0) return {1.0};
  const auto radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> taps(2 * static_cast<std::size_t>(radius) + 1);
  double sum = 0.0;
  for (int t = -radius; t <= radius; ++t) {
    const double w = std::exp(-static_cast<double>(t) * t / (2.0 * sigma * sigma));
    taps[static_cast<std::size_t>(t + radius)] = w;
    sum += w;
  }
  for (auto& w : taps) w /= sum;
  return taps;
}

void blur_in_place(const Dims& dims, std::vector<double>& values, double sigma) {
  const auto taps = gaussian_kernel_1d(sigma);
  if (taps.size() == 1) return;
  const auto radius = static_cast<std::ptrdiff_t>(taps.size() / 2);

  std::vector<double> line;
  std::vector<double> out;
  std::size_t stride = 1;
  for (std::size_t axis = dims.size(); axis-- > 0;) {
    const std::size_t len = dims[axis];
    const std::size_t outer = values.size() / (len * stride);
    line.resize(len);
    out.resize(len);
    for (std::size_t o = 0; o < outer; ++o) {
      for (std::size_t s = 0; s < stride; ++s) {
        const std::size_t base = o * len * stride + s;
        for (std::size_t i = 0; i < len; ++i) line[i] = values[base + i * stride];
        const auto last = static_cast<std::ptrdiff_t>(len) - 1;
        for (std::ptrdiff_t i = 0; i <= last; ++i) {
          double acc = 0.0;
          for (std::ptrdiff_t t = -radius; t <= radius; ++t) {
            const auto src = std::clamp<std::ptrdiff_t>(i + t, 0, last);
            acc += taps[static_cast<std::size_t>(t + radius)] * line[static_cast<std::size_t>(src)];
          }
          out[static_cast<std::size_t>(i)] = acc;
        }
        for (std::size_t i = 0; i < len; ++i) values[base + i * stride] = out[i];
      }
    }
    stride *= len;
  }
}

ScalarImage blur(const ScalarImage& img, double sigma) {
  std::vector<double> values(img.data().begin(), img.data().end());
  blur_in_place(img.dims(), values, sigma);
  return ScalarImage(img.dims(), std::move(values));
}

double NormalSampler::uniform_open() {
  // 53 random bits mapped onto (0, 1].
  return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
}

double NormalSampler::operator()() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform_open();
  const double u2 = uniform_open();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double phi = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(phi);
  has_spare_ = true;
  return r * std::cos(phi);
}

Geometry parse_geometry(std::string_view name) {
  if (name == "nested_squares") return Geometry::NestedSquares;
  if (name == "nested_disks") return Geometry::NestedDisks;
  throw Error(Errc::InvalidArgument, "unknown geometry '" + std::string(name) + "'");
}

std::string_view to_string(Geometry g) noexcept {
  return g == Geometry::NestedSquares ? "nested_squares" : "nested_disks";
}

LabelImage phantom_geometry(const Dims& dims, std::size_t num_classes, Geometry geometry) {
  check_dims(dims);
  if (num_classes < 2) throw Error(Errc::ClassCountError, "phantom needs at least 2 classes");
  const std::size_t min_extent = *std::min_element(dims.begin(), dims.end());
  // The innermost region spans about 1/K of the extent^2 area; the K-1 outer
  // rings share the remaining margin in equal widths.
  const double half = static_cast<double>(min_extent) / 2.0;
  const double ring_width = half * (1.0 - 1.0 / std::sqrt(static_cast<double>(num_classes))) /
                            static_cast<double>(num_classes - 1);
  const auto margin = static_cast<std::size_t>(ring_width);
  if (margin < 1) {
    throw Error(Errc::GeometryError, "extent " + std::to_string(min_extent) + " too small for " +
                                         std::to_string(num_classes) + " nested rings");
  }

  const std::size_t n = voxel_count(dims);
  std::vector<Label> labels(n);
  std::vector<std::size_t> idx(dims.size(), 0);
  for (std::size_t j = 0; j < n; ++j) {
    std::size_t ring = 0;
    if (geometry == Geometry::NestedSquares) {
      std::size_t border = min_extent;
      for (std::size_t a = 0; a < dims.size(); ++a) {
        border = std::min({border, idx[a], dims[a] - 1 - idx[a]});
      }
      ring = border / margin;
    } else {
      double r2 = 0.0;
      for (std::size_t a = 0; a < dims.size(); ++a) {
        const double d = static_cast<double>(idx[a]) + 0.5 - static_cast<double>(dims[a]) / 2.0;
        r2 += d * d;
      }
      const double from_edge = half - std::sqrt(r2);
      ring = from_edge <= 0.0 ? 0 : static_cast<std::size_t>(from_edge / ring_width);
    }
    labels[j] = static_cast<Label>(std::min(ring, num_classes - 1));

    for (std::size_t a = dims.size(); a-- > 0;) {
      if (++idx[a] < dims[a]) break;
      idx[a] = 0;
    }
  }
  return LabelImage(dims, num_classes, std::move(labels));
}

Phantom make_phantom(const PhantomSpec& spec) {
  const std::size_t K = spec.num_classes();
  if (K < 2) throw Error(Errc::ClassCountError, "phantom needs at least 2 class means");
  if (!(spec.noise_std >= 0.0) || !(spec.blur_sigma >= 0.0)) {
    throw Error(Errc::InvalidArgument, "noise_std and blur_sigma must be non-negative");
  }

  LabelImage labels = phantom_geometry(spec.dims, K, spec.geometry);

  std::vector<double> values(labels.size());
  for (std::size_t j = 0; j < labels.size(); ++j) values[j] = spec.class_means[labels[j]];
  blur_in_place(spec.dims, values, spec.blur_sigma);

  if (spec.noise_std > 0.0) {
    NormalSampler normal(spec.seed);
    for (auto& v : values) v += spec.noise_std * normal();
  }

  ProbMap truth = soften_labels(labels, K, spec.blur_sigma);
  return Phantom{ScalarImage(spec.dims, std::move(values)), std::move(labels), std::move(truth)};
}

}  // namespace cadapt
