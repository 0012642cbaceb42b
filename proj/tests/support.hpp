#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <random>
#include <utility>
#include <vector>

#include <doctest.h>

#include "cadapt/errors.hpp"
#include "cadapt/volume.hpp"

namespace cadapt::testing {

/// Code of the cadapt::Error thrown by `fn`; fails the test if none is thrown.
template <typename Fn>
Errc error_code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected cadapt::Error");
  return Errc::InvalidArgument;
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("cadapt-test-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

inline void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream(path, std::ios::binary) << bytes;
}

/// Small random generator shared by the property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  std::size_t index(std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(engine_);
  }

  Dims dims2(std::size_t max_extent) { return {index(1, max_extent), index(1, max_extent)}; }

  /// Dims whose voxel count stays at or below max_voxels.
  Dims dims_bounded(std::size_t max_voxels) {
    if (index(0, 1) == 0) {
      const std::size_t rows = index(1, 40);
      return {rows, index(1, max_voxels / rows)};
    }
    const std::size_t a = index(1, 10);
    const std::size_t b = index(1, 10);
    return {a, b, index(1, std::max<std::size_t>(1, max_voxels / (a * b)))};
  }

  std::vector<double> values(std::size_t n, double lo, double hi) {
    std::vector<double> v(n);
    for (auto& x : v) x = uniform(lo, hi);
    return v;
  }

  ScalarImage image(const Dims& dims, double lo = -10.0, double hi = 10.0) {
    return ScalarImage(dims, values(voxel_count(dims), lo, hi));
  }

  /// Random dense ProbMap; every voxel is a normalized positive vector.
  ProbMap probmap(const Dims& dims, std::size_t K) {
    const std::size_t n = voxel_count(dims);
    std::vector<double> data(n * K);
    for (std::size_t j = 0; j < n; ++j) {
      double sum = 0.0;
      for (std::size_t k = 0; k < K; ++k) sum += data[j * K + k] = uniform(0.01, 1.0);
      for (std::size_t k = 0; k < K; ++k) data[j * K + k] /= sum;
    }
    return ProbMap(dims, K, std::move(data));
  }

  LabelImage labels(const Dims& dims, std::size_t K) {
    std::vector<Label> data(voxel_count(dims));
    for (auto& l : data) l = static_cast<Label>(index(0, K - 1));
    return LabelImage(dims, K, std::move(data));
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

/// Dense Gaussian elimination with partial pivoting on an explicit n x n system.
inline std::vector<double> solve_dense(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    }
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double acc = b[i];
    for (std::size_t c = i + 1; c < n; ++c) acc -= a[i][c] * x[c];
    x[i] = acc / a[i][i];
  }
  return x;
}

/// Least-squares centroids via an explicit dense P matrix: forms P^T P and
/// P^T x from the materialized rows, then eliminates.
inline std::vector<double> oracle_centroids(const ProbMap& p, const ScalarImage& img) {
  const std::size_t K = p.num_classes();
  const std::size_t n = p.num_voxels();
  std::vector<std::vector<double>> P(n, std::vector<double>(K));
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < K; ++k) P[j][k] = p(j, k);
  }
  std::vector<std::vector<double>> ptp(K, std::vector<double>(K, 0.0));
  std::vector<double> ptx(K, 0.0);
  for (std::size_t a = 0; a < K; ++a) {
    for (std::size_t b = 0; b < K; ++b) {
      for (std::size_t j = 0; j < n; ++j) ptp[a][b] += P[j][a] * P[j][b];
    }
    for (std::size_t j = 0; j < n; ++j) ptx[a] += P[j][a] * img[j];
  }
  return solve_dense(std::move(ptp), std::move(ptx));
}

/// Normwise relative error max_i |got_i - want_i| / max_i |want_i|.
inline double max_rel_error(const std::vector<double>& got, const std::vector<double>& want) {
  double diff = 0.0;
  double scale = 0.0;
  for (std::size_t i = 0; i < want.size(); ++i) {
    diff = std::max(diff, std::abs(got[i] - want[i]));
    scale = std::max(scale, std::abs(want[i]));
  }
  return scale > 0.0 ? diff / scale : diff;
}

}  // namespace cadapt::testing
