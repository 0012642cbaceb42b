#include "cadapt/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "cadapt/errors.hpp"

namespace cadapt {

namespace {

void check_same_dims(const LabelImage& a, const LabelImage& b) {
  if (a.dims() != b.dims()) throw Error(Errc::DimensionError, "label images differ in dims");
}

}  // namespace

double classification_error(const LabelImage& pred, const LabelImage& truth) {
  check_same_dims(pred, truth);
  std::size_t wrong = 0;
  for (std::size_t j = 0; j < pred.size(); ++j) wrong += pred[j] != truth[j];
  return static_cast<double>(wrong) / static_cast<double>(pred.size());
}

double dice(const LabelImage& pred, const LabelImage& truth, Label k) {
  check_same_dims(pred, truth);
  std::size_t a = 0;
  std::size_t b = 0;
  std::size_t both = 0;
  for (std::size_t j = 0; j < pred.size(); ++j) {
    const bool in_a = pred[j] == k;
    const bool in_b = truth[j] == k;
    a += in_a;
    b += in_b;
    both += in_a && in_b;
  }
  if (a + b == 0) return 1.0;
  return 2.0 * static_cast<double>(both) / static_cast<double>(a + b);
}

std::vector<std::size_t> class_volumes(const LabelImage& labels, std::size_t num_classes) {
  std::vector<std::size_t> counts(num_classes, 0);
  for (Label l : labels.data()) {
    if (l < num_classes) ++counts[l];
  }
  return counts;
}

double volume_consistency(const LabelImage& a, const LabelImage& b, std::span<const Label> classes) {
  check_same_dims(a, b);
  auto in_set = [&](Label l) { return std::find(classes.begin(), classes.end(), l) != classes.end(); };
  std::size_t va = 0;
  std::size_t vb = 0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    va += in_set(a[j]);
    vb += in_set(b[j]);
  }
  if (va + vb == 0) throw Error(Errc::ZeroVolume, "both volumes are zero for the selected classes");
  const double diff = std::abs(static_cast<double>(va) - static_cast<double>(vb));
  return diff / ((static_cast<double>(va) + static_cast<double>(vb)) / 2.0) * 100.0;
}

SegmentationReport evaluate(const LabelImage& pred, const LabelImage& truth) {
  SegmentationReport report;
  report.classification_error = classification_error(pred, truth);
  const std::size_t K = std::max(pred.num_classes(), truth.num_classes());
  report.dice.reserve(K);
  for (std::size_t k = 0; k < K; ++k) report.dice.push_back(dice(pred, truth, static_cast<Label>(k)));
  report.pred_volumes = class_volumes(pred, K);
  report.truth_volumes = class_volumes(truth, K);
  return report;
}

}  // namespace cadapt
