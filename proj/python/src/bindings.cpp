#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "cadapt/adapt.hpp"
#include "cadapt/classifier.hpp"
#include "cadapt/errors.hpp"
#include "cadapt/metrics.hpp"
#include "cadapt/phantom.hpp"
#include "cadapt/simulator.hpp"
#include "cadapt/volume.hpp"

namespace py = pybind11;
using namespace cadapt;

namespace {

using F64Array = py::array_t<double, py::array::c_style | py::array::forcecast>;
using LabelArray = py::array_t<Label, py::array::c_style | py::array::forcecast>;

Dims shape_of(const py::array& a, py::ssize_t drop_trailing = 0) {
  Dims dims;
  for (py::ssize_t i = 0; i < a.ndim() - drop_trailing; ++i) dims.push_back(static_cast<std::size_t>(a.shape(i)));
  return dims;
}

std::vector<py::ssize_t> shape_with(const Dims& dims, std::size_t extra = 0) {
  std::vector<py::ssize_t> shape(dims.begin(), dims.end());
  if (extra) shape.push_back(static_cast<py::ssize_t>(extra));
  return shape;
}

ScalarImage to_image(const F64Array& a) {
  return ScalarImage(shape_of(a), std::vector<double>(a.data(), a.data() + a.size()));
}

ProbMap to_probmap(const F64Array& a) {
  if (a.ndim() < 3) throw Error(Errc::DimensionError, "probability arrays have shape dims + (K,)");
  return ProbMap(shape_of(a, 1), static_cast<std::size_t>(a.shape(a.ndim() - 1)),
                 std::vector<double>(a.data(), a.data() + a.size()));
}

LabelImage to_labels(const LabelArray& a, std::size_t num_classes) {
  std::vector<Label> data(a.data(), a.data() + a.size());
  if (num_classes == 0) {
    Label hi = 0;
    for (Label l : data) hi = std::max(hi, l);
    num_classes = std::max<std::size_t>(2, hi + 1u);
  }
  return LabelImage(shape_of(a), num_classes, std::move(data));
}

F64Array from_image(const ScalarImage& img) {
  F64Array out(shape_with(img.dims()));
  std::copy(img.data().begin(), img.data().end(), out.mutable_data());
  return out;
}

F64Array from_probmap(const ProbMap& p) {
  F64Array out(shape_with(p.dims(), p.num_classes()));
  std::copy(p.data().begin(), p.data().end(), out.mutable_data());
  return out;
}

LabelArray from_labels(const LabelImage& l) {
  LabelArray out(shape_with(l.dims()));
  std::copy(l.data().begin(), l.data().end(), out.mutable_data());
  return out;
}

std::vector<TrainingPair> to_training(const std::vector<F64Array>& images, const std::vector<F64Array>& probs) {
  if (images.size() != probs.size()) throw Error(Errc::InvalidArgument, "need one probability map per image");
  std::vector<TrainingPair> out;
  for (std::size_t t = 0; t < images.size(); ++t) out.push_back({to_image(images[t]), to_probmap(probs[t])});
  return out;
}

}  // namespace

PYBIND11_MODULE(_cadapt, m) {
  m.doc() = "Contrast-adaptive supervised segmentation (C++ core)";

  py::register_exception<Error>(m, "CadaptError", PyExc_ValueError);

  m.def(
      "make_phantom",
      [](std::vector<std::size_t> dims, std::vector<double> means, double blur_sigma, double noise_std,
         const std::string& geometry, std::uint64_t seed) {
        PhantomSpec spec;
        spec.dims = Dims(dims.begin(), dims.end());
        spec.class_means = std::move(means);
        spec.blur_sigma = blur_sigma;
        spec.noise_std = noise_std;
        spec.geometry = parse_geometry(geometry);
        spec.seed = seed;
        const Phantom ph = make_phantom(spec);
        return py::make_tuple(from_image(ph.image), from_labels(ph.labels), from_probmap(ph.truth));
      },
      py::arg("dims") = std::vector<std::size_t>{128, 128},
      py::arg("means") = std::vector<double>{0.0, 5.0, 10.0}, py::arg("blur_sigma") = 1.0,
      py::arg("noise_std") = 0.5, py::arg("geometry") = "nested_squares", py::arg("seed") = 0,
      "Returns (image, labels, truth_prob).");

  m.def("gaussian_kernel_1d", &gaussian_kernel_1d, py::arg("sigma"));
  m.def(
      "blur", [](const F64Array& img, double sigma) { return from_image(blur(to_image(img), sigma)); },
      py::arg("image"), py::arg("sigma"));

  m.def(
      "fit_classifier",
      [](const std::vector<F64Array>& images, const std::vector<F64Array>& probs) {
        const auto params = fit_classifier(to_training(images, probs));
        return py::make_tuple(params.means, params.variances);
      },
      py::arg("images"), py::arg("probs"), "Returns (means, variances).");
  m.def(
      "classify",
      [](const F64Array& img, std::vector<double> means, std::vector<double> variances) {
        return from_probmap(classify(to_image(img), GaussianClassParams{std::move(means), std::move(variances)}));
      },
      py::arg("image"), py::arg("means"), py::arg("variances"));
  m.def(
      "argmax_labels", [](const F64Array& prob) { return from_labels(argmax_labels(to_probmap(prob))); },
      py::arg("prob"));

  m.def(
      "simulate",
      [](const F64Array& prob, std::vector<double> centroids) {
        return from_image(simulate(to_probmap(prob), SimulationParams{std::move(centroids)}));
      },
      py::arg("prob"), py::arg("centroids"));
  m.def(
      "estimate_centroids",
      [](const F64Array& prob, const F64Array& img) {
        return estimate_centroids(to_probmap(prob), to_image(img)).centroids;
      },
      py::arg("prob"), py::arg("image"));
  m.def(
      "soften_labels",
      [](const LabelArray& labels, std::size_t num_classes, double sigma) {
        return from_probmap(soften_labels(to_labels(labels, num_classes), num_classes, sigma));
      },
      py::arg("labels"), py::arg("num_classes"), py::arg("sigma"));
  m.def(
      "refit_residual_variance",
      [](const F64Array& prob, const F64Array& img, std::vector<double> centroids) {
        return refit_residual_variance(to_probmap(prob), to_image(img), SimulationParams{std::move(centroids)});
      },
      py::arg("prob"), py::arg("image"), py::arg("centroids"));

  m.def(
      "segment_standard",
      [](const std::vector<F64Array>& images, const std::vector<F64Array>& probs, const F64Array& input) {
        const auto seg = segment_standard(to_training(images, probs), to_image(input));
        return py::make_tuple(from_probmap(seg.prob), from_labels(seg.labels));
      },
      py::arg("train_images"), py::arg("train_probs"), py::arg("input"), "Returns (prob, labels).");
  m.def(
      "adapt_segment",
      [](const std::vector<F64Array>& images, const std::vector<F64Array>& probs, const F64Array& input,
         std::size_t max_iters, double convergence_frac, const std::string& variance_mode, double add_noise_std,
         std::uint64_t seed) {
        AdaptConfig cfg;
        cfg.max_iters = max_iters;
        cfg.convergence_frac = convergence_frac;
        cfg.variance_mode = parse_variance_mode(variance_mode);
        cfg.add_noise_std = add_noise_std;
        cfg.noise_seed = seed;
        const auto training = to_training(images, probs);
        const ScalarImage in = to_image(input);
        AdaptResult r;
        {
          py::gil_scoped_release release;
          r = adapt_segment(training, in, cfg);
        }
        py::dict out;
        out["prob"] = from_probmap(r.prob);
        out["labels"] = from_labels(r.labels);
        out["theta"] = r.theta.centroids;
        out["means"] = r.classifier.means;
        out["variances"] = r.classifier.variances;
        out["iterations_used"] = r.iterations_used;
        out["change_fractions"] = r.change_fractions;
        out["converged"] = r.converged;
        out["diverged"] = r.diverged;
        return out;
      },
      py::arg("train_images"), py::arg("train_probs"), py::arg("input"), py::arg("max_iters") = 50,
      py::arg("convergence_frac") = 1e-4, py::arg("variance_mode") = "simulated", py::arg("add_noise_std") = 0.0,
      py::arg("seed") = 0);

  m.def(
      "classification_error",
      [](const LabelArray& pred, const LabelArray& truth) {
        return classification_error(to_labels(pred, 65535), to_labels(truth, 65535));
      },
      py::arg("pred"), py::arg("truth"));
  m.def(
      "dice",
      [](const LabelArray& pred, const LabelArray& truth, Label k) {
        return dice(to_labels(pred, 65535), to_labels(truth, 65535), k);
      },
      py::arg("pred"), py::arg("truth"), py::arg("k"));
  m.def(
      "volume_consistency",
      [](const LabelArray& a, const LabelArray& b, const std::vector<Label>& classes) {
        return volume_consistency(to_labels(a, 65535), to_labels(b, 65535), classes);
      },
      py::arg("a"), py::arg("b"), py::arg("classes"));

  m.def(
      "save_volume", [](const F64Array& img, const std::string& path) { save_volume(to_image(img), path); },
      py::arg("image"), py::arg("path"));
  m.def(
      "load_volume", [](const std::string& path) { return from_image(load_volume(path)); }, py::arg("path"));
  m.def(
      "save_probmap", [](const F64Array& p, const std::string& path) { save_probmap(to_probmap(p), path); },
      py::arg("prob"), py::arg("path"));
  m.def(
      "load_probmap", [](const std::string& path) { return from_probmap(load_probmap(path)); }, py::arg("path"));
}
