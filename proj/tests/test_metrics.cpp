#include <doctest.h>

#include "cadapt/metrics.hpp"
#include "support.hpp"

using namespace cadapt;
using cadapt::testing::error_code_of;
using cadapt::testing::Gen;

namespace {

LabelImage row(std::vector<Label> v, std::size_t K = 2) {
  const std::size_t n = v.size();
  return LabelImage({1, n}, K, std::move(v));
}

}  // namespace

TEST_CASE("classification error examples") {
  CHECK(classification_error(row({0, 1, 1, 0}), row({0, 1, 1, 0})) == 0.0);
  CHECK(classification_error(row({0, 1, 1, 0}), row({0, 1, 1, 1})) == 0.25);
  CHECK(classification_error(row({0, 0, 1, 1}), row({1, 1, 0, 0})) == 1.0);
}

TEST_CASE("dice examples") {
  CHECK(dice(row({1, 1, 0}), row({1, 1, 0}), 1) == 1.0);
  CHECK(dice(row({1, 1, 0}), row({0, 1, 1}), 1) == 0.5);
  CHECK(dice(row({1, 0, 0}), row({0, 1, 0}), 1) == 0.0);
  CHECK(dice(row({0, 0}), row({0, 0}), 1) == 1.0);
}

TEST_CASE("volume consistency examples") {
  std::vector<Label> a(200, 0);
  std::vector<Label> b(200, 0);
  std::fill(a.begin(), a.begin() + 110, 1);
  std::fill(b.begin(), b.begin() + 90, 1);
  const std::vector<Label> cls{1};
  // |110 - 90| / 100 * 100.
  CHECK(volume_consistency(row(a), row(b), cls) == doctest::Approx(20.0).epsilon(1e-15));
  CHECK(volume_consistency(row(a), row(a), cls) == 0.0);
  const std::vector<Label> none{1};
  CHECK(error_code_of([&] { volume_consistency(row({0, 0}), row({0, 0}), none); }) == Errc::ZeroVolume);
}

TEST_CASE("metrics reject mismatched dims") {
  const LabelImage a({2, 2}, 2, {0, 1, 0, 1});
  const LabelImage b({1, 4}, 2, {0, 1, 0, 1});
  CHECK(error_code_of([&] { classification_error(a, b); }) == Errc::DimensionError);
  CHECK(error_code_of([&] { dice(a, b, 1); }) == Errc::DimensionError);
}

TEST_CASE("evaluate reports per-class dice and volumes") {
  const SegmentationReport r = evaluate(row({0, 1, 2, 2}, 3), row({0, 1, 1, 2}, 3));
  CHECK(r.classification_error == 0.25);
  CHECK(r.dice == std::vector<double>{1.0, 2.0 / 3.0, 2.0 / 3.0});
  CHECK(r.pred_volumes == std::vector<std::size_t>{1, 1, 2});
  CHECK(r.truth_volumes == std::vector<std::size_t>{1, 2, 1});
}

TEST_CASE("property: metrics are symmetric and bounded") {
  Gen gen(51);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t K = gen.index(2, 5);
    const Dims dims = gen.dims2(10);
    const LabelImage a = gen.labels(dims, K);
    const LabelImage b = gen.labels(dims, K);
    const double e = classification_error(a, b);
    REQUIRE(e == classification_error(b, a));
    REQUIRE(e >= 0.0);
    REQUIRE(e <= 1.0);
    for (std::size_t k = 0; k < K; ++k) {
      const double d = dice(a, b, static_cast<Label>(k));
      REQUIRE(d == dice(b, a, static_cast<Label>(k)));
      REQUIRE(d >= 0.0);
      REQUIRE(d <= 1.0);
    }
  }
}

TEST_CASE("property: zero error iff every present class has dice 1") {
  Gen gen(52);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t K = gen.index(2, 4);
    const Dims dims = gen.dims2(4);
    const LabelImage a = gen.labels(dims, K);
    // Half the time compare with an exact copy so both directions are exercised.
    const LabelImage b = gen.index(0, 1) ? a : gen.labels(dims, K);
    bool all_one = true;
    for (std::size_t k = 0; k < K; ++k) all_one &= dice(a, b, static_cast<Label>(k)) == 1.0;
    REQUIRE((classification_error(a, b) == 0.0) == all_one);
  }
}
