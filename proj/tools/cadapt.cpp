// cadapt - contrast-adaptive segmentation command-line tool.
//
// Exit codes: 0 success, 1 I/O, 2 usage, 3 data mismatch, 4 malformed file,
// 5 numerical failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cadapt/adapt.hpp"
#include "cadapt/classifier.hpp"
#include "cadapt/errors.hpp"
#include "cadapt/metrics.hpp"
#include "cadapt/phantom.hpp"
#include "cadapt/simulator.hpp"
#include "cadapt/sweep.hpp"
#include "cadapt/volume.hpp"

namespace {

using namespace cadapt;

enum Exit : int { kOk = 0, kIo = 1, kUsage = 2, kMismatch = 3, kMalformed = 4, kNumeric = 5 };

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::IoError: return kIo;
    case Errc::InvalidArgument:
    case Errc::GeometryError: return kUsage;
    case Errc::DimensionError:
    case Errc::ClassCountError: return kMismatch;
    case Errc::MagicMismatch:
    case Errc::Truncated:
    case Errc::PayloadMismatch:
    case Errc::NotNormalized:
    case Errc::NonFinite:
    case Errc::LabelRangeError: return kMalformed;
    case Errc::EmptyClass:
    case Errc::ZeroVolume: return kNumeric;
  }
  return kNumeric;
}

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string join(const std::vector<double>& values) {
  std::string out;
  char buf[32];
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.6g", values[i]);
    if (i) out += ',';
    out += buf;
  }
  return out;
}

struct PhantomFlags {
  std::vector<std::size_t> dims{128, 128};
  std::vector<double> means{0.0, 5.0, 10.0};
  double blur_sigma = 1.0;
  double noise_std = 0.5;
  std::string geometry = "nested_squares";
  std::uint64_t seed = 0;

  void attach(CLI::App& cmd) {
    cmd.add_option("--dims", dims, "Grid extents, e.g. 128,128")->delimiter(',');
    cmd.add_option("--means", means, "Class means, outermost class first")->delimiter(',');
    cmd.add_option("--blur-sigma", blur_sigma, "Gaussian blur width in voxels");
    cmd.add_option("--noise-std", noise_std, "Additive Gaussian noise std");
    cmd.add_option("--geometry", geometry, "nested_squares | nested_disks");
    cmd.add_option("--seed", seed, "Noise RNG seed");
  }

  PhantomSpec spec() const {
    if (means.size() < 2) throw UsageError("--means needs at least 2 classes");
    if (blur_sigma < 0.0 || noise_std < 0.0) throw UsageError("--blur-sigma and --noise-std must be >= 0");
    PhantomSpec s;
    s.dims = Dims(dims.begin(), dims.end());
    s.class_means = means;
    s.blur_sigma = blur_sigma;
    s.noise_std = noise_std;
    s.geometry = parse_geometry(geometry);
    s.seed = seed;
    return s;
  }
};

struct TrainingFlags {
  std::vector<std::string> images;
  std::vector<std::string> probs;
  std::vector<std::string> labels;
  std::string input;
  std::string out_labels;
  std::string out_prob;
  std::string out_pgm;

  void attach(CLI::App& cmd) {
    cmd.add_option("--train-img", images, "Training image (CAV1), repeatable")->required();
    cmd.add_option("--train-prob", probs, "Training probability map (CAP1), one per image");
    cmd.add_option("--train-labels", labels, "Training hard labels (CAV1), softened by --soften-sigma");
    cmd.add_option("--input", input, "Image to segment (CAV1)")->required();
    cmd.add_option("--out-labels", out_labels, "Output label image (CAV1)");
    cmd.add_option("--out-prob", out_prob, "Output probability map (CAP1)");
    cmd.add_option("--out-pgm", out_pgm, "Output label preview (PGM, 2-D only)");
  }

  std::vector<TrainingPair> load(double soften_sigma) const {
    const bool soft = !probs.empty();
    if (soft == !labels.empty()) throw UsageError("give exactly one of --train-prob or --train-labels");
    const auto& maps = soft ? probs : labels;
    if (maps.size() != images.size()) throw UsageError("each --train-img needs one probability/label file");
    std::vector<TrainingPair> training;
    std::size_t K = 0;
    if (!soft) {
      for (const auto& path : labels) {
        const LabelImage l = load_labels(path);
        K = std::max(K, l.num_classes());
      }
    }
    for (std::size_t t = 0; t < images.size(); ++t) {
      ScalarImage img = load_volume(images[t]);
      ProbMap p = soft ? load_probmap(maps[t]) : soften_labels(load_labels(maps[t], K), K, soften_sigma);
      training.push_back({std::move(img), std::move(p)});
    }
    return training;
  }

  void write(const ProbMap& prob, const LabelImage& labels_out) const {
    if (!out_labels.empty()) save_labels(labels_out, out_labels);
    if (!out_prob.empty()) save_probmap(prob, out_prob);
    if (!out_pgm.empty()) {
      std::vector<double> values(labels_out.data().begin(), labels_out.data().end());
      export_pgm(ScalarImage(labels_out.dims(), std::move(values)), out_pgm);
    }
  }
};

std::string volumes_line(const LabelImage& labels) {
  std::string out = "volumes=";
  const auto v = class_volumes(labels, labels.num_classes());
  for (std::size_t k = 0; k < v.size(); ++k) out += (k ? "," : "") + std::to_string(v[k]);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Contrast-adaptive supervised segmentation"};
  app.require_subcommand(1);

  // phantom
  auto* phantom_cmd = app.add_subcommand("phantom", "Generate a synthetic nested-ring phantom");
  PhantomFlags phantom_flags;
  phantom_flags.attach(*phantom_cmd);
  std::string out_img, out_truth_labels, out_truth_prob, out_preview;
  phantom_cmd->add_option("--out-img", out_img, "Intensity image (CAV1)")->required();
  phantom_cmd->add_option("--out-labels", out_truth_labels, "Hard labels (CAV1)");
  phantom_cmd->add_option("--out-prob", out_truth_prob, "Partial-volume truth map (CAP1)");
  phantom_cmd->add_option("--out-pgm", out_preview, "Intensity preview (PGM)");

  // segment / adapt
  double soften_sigma = 1.0;
  auto* segment_cmd = app.add_subcommand("segment", "Standard Gaussian-classifier segmentation");
  TrainingFlags segment_flags;
  segment_flags.attach(*segment_cmd);
  segment_cmd->add_option("--soften-sigma", soften_sigma, "Blur width for --train-labels");

  auto* adapt_cmd = app.add_subcommand("adapt", "Contrast-adaptive segmentation");
  TrainingFlags adapt_flags;
  adapt_flags.attach(*adapt_cmd);
  AdaptConfig cfg;
  std::string variance_mode = "simulated";
  std::string out_sim, out_sim_pgm;
  adapt_cmd->add_option("--soften-sigma", soften_sigma, "Blur width for --train-labels");
  adapt_cmd->add_option("--max-iters", cfg.max_iters, "Iteration cap");
  adapt_cmd->add_option("--convergence-frac", cfg.convergence_frac, "Stop below this label-change fraction");
  adapt_cmd->add_option("--variance-mode", variance_mode, "simulated | residual");
  adapt_cmd->add_option("--add-noise-std", cfg.add_noise_std, "Noise std added to simulated training images");
  adapt_cmd->add_option("--seed", cfg.noise_seed, "Seed for the simulated-training noise");
  adapt_cmd->add_option("--out-sim", out_sim, "First simulated training image (CAV1)");
  adapt_cmd->add_option("--out-sim-pgm", out_sim_pgm, "First simulated training image (PGM)");

  // simulate
  auto* simulate_cmd = app.add_subcommand("simulate", "Synthesize an image from class probabilities");
  std::string sim_prob, sim_labels, sim_out, sim_pgm;
  std::vector<double> theta;
  simulate_cmd->add_option("--prob", sim_prob, "Probability map (CAP1)");
  simulate_cmd->add_option("--labels", sim_labels, "Hard labels (CAV1), softened by --soften-sigma");
  simulate_cmd->add_option("--soften-sigma", soften_sigma, "Blur width for --labels");
  simulate_cmd->add_option("--theta", theta, "Class centroids, e.g. 0,7,10")->delimiter(',')->required();
  simulate_cmd->add_option("--out", sim_out, "Simulated image (CAV1)")->required();
  simulate_cmd->add_option("--out-pgm", sim_pgm, "Simulated image preview (PGM)");

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "Classification error versus center-class mean");
  SweepSpec sweep;
  PhantomFlags sweep_phantom;
  sweep_phantom.attach(*sweep_cmd);
  std::string sweep_out, sweep_stats;
  unsigned jobs = 1;
  sweep_cmd->add_option("--lo", sweep.lo, "First center mean");
  sweep_cmd->add_option("--hi", sweep.hi, "Last center mean");
  sweep_cmd->add_option("--step", sweep.step, "Center mean step");
  sweep_cmd->add_option("--train-mean", sweep.train_mean, "Center mean of the fixed training data");
  sweep_cmd->add_option("--trials", sweep.trials, "Trials (distinct seeds) per point");
  sweep_cmd->add_option("--center-class", sweep.center_class, "Index of the class whose mean is swept");
  sweep_cmd->add_option("--max-iters", sweep.adapt.max_iters, "Adaptation iteration cap");
  sweep_cmd->add_option("--jobs", jobs, "Worker threads");
  sweep_cmd->add_option("--out", sweep_out, "Output CSV")->required();
  sweep_cmd->add_option("--stats-out", sweep_stats, "Optional CSV with per-method standard errors");

  // metrics
  auto* metrics_cmd = app.add_subcommand("metrics", "Compare two label images");
  std::string pred_path, truth_path;
  std::vector<unsigned> volume_classes;
  metrics_cmd->add_option("--pred", pred_path, "Predicted labels (CAV1)")->required();
  metrics_cmd->add_option("--truth", truth_path, "Reference labels (CAV1)")->required();
  metrics_cmd->add_option("--classes", volume_classes, "Classes pooled for volume consistency (default: all but 0)")
      ->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*phantom_cmd) {
      const Phantom ph = make_phantom(phantom_flags.spec());
      save_volume(ph.image, out_img);
      if (!out_truth_labels.empty()) save_labels(ph.labels, out_truth_labels);
      if (!out_truth_prob.empty()) save_probmap(ph.truth, out_truth_prob);
      if (!out_preview.empty()) export_pgm(ph.image, out_preview);
    } else if (*segment_cmd) {
      const auto training = segment_flags.load(soften_sigma);
      const ScalarImage input = load_volume(segment_flags.input);
      const Segmentation seg = segment_standard(training, input);
      segment_flags.write(seg.prob, seg.labels);
      std::cout << "classes=" << seg.prob.num_classes() << ' ' << volumes_line(seg.labels) << '\n';
    } else if (*adapt_cmd) {
      cfg.variance_mode = parse_variance_mode(variance_mode);
      cfg.soften_sigma = soften_sigma;
      cfg.validate();
      const auto training = adapt_flags.load(soften_sigma);
      const ScalarImage input = load_volume(adapt_flags.input);
      char line[64];
      const AdaptResult result = adapt_segment(training, input, cfg, [&](const IterationRecord& rec) {
        std::snprintf(line, sizeof line, "%.6g", rec.changed_frac);
        std::cout << "iter=" << rec.iteration << " changed_frac=" << line << " theta=" << join(rec.theta.centroids)
                  << '\n';
      });
      adapt_flags.write(result.prob, result.labels);
      if (!out_sim.empty()) save_volume(result.simulated_training.front(), out_sim);
      if (!out_sim_pgm.empty()) export_pgm(result.simulated_training.front(), out_sim_pgm);
      std::cout << "converged=" << result.converged << " diverged=" << result.diverged
                << " iterations=" << result.iterations_used << " theta=" << join(result.theta.centroids) << ' '
                << volumes_line(result.labels) << '\n';
      if (result.failure) {
        std::cerr << "adaptation stopped early: " << to_string(*result.failure) << '\n';
        return kNumeric;
      }
    } else if (*simulate_cmd) {
      if (sim_prob.empty() == sim_labels.empty()) throw UsageError("give exactly one of --prob or --labels");
      ProbMap p = sim_prob.empty() ? soften_labels(load_labels(sim_labels, theta.size()), theta.size(), soften_sigma)
                                   : load_probmap(sim_prob);
      const ScalarImage y = simulate(p, SimulationParams{theta});
      save_volume(y, sim_out);
      if (!sim_pgm.empty()) export_pgm(y, sim_pgm);
    } else if (*sweep_cmd) {
      sweep.phantom = sweep_phantom.spec();
      const auto points = run_sweep(sweep, jobs);
      std::ofstream out(sweep_out, std::ios::binary | std::ios::trunc);
      if (!out) throw Error(Errc::IoError, "cannot open for writing: " + sweep_out);
      write_sweep_csv(out, points);
      if (!sweep_stats.empty()) {
        std::ofstream stats(sweep_stats, std::ios::binary | std::ios::trunc);
        if (!stats) throw Error(Errc::IoError, "cannot open for writing: " + sweep_stats);
        stats << "mean,ideal,ideal_se,fixed,fixed_se,adaptive,adaptive_se\n";
        char row[192];
        for (const auto& p : points) {
          std::snprintf(row, sizeof row, "%.6g,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g\n", p.mean, p.ideal.mean,
                        p.ideal.std_error, p.fixed.mean, p.fixed.std_error, p.adaptive.mean, p.adaptive.std_error);
          stats << row;
        }
      }
    } else if (*metrics_cmd) {
      const LabelImage pred = load_labels(pred_path);
      const LabelImage truth = load_labels(truth_path);
      const SegmentationReport report = evaluate(pred, truth);
      std::cout << "error=" << report.classification_error << '\n';
      for (std::size_t k = 0; k < report.dice.size(); ++k) {
        std::cout << "dice_" << k << '=' << report.dice[k] << '\n';
      }
      for (std::size_t k = 0; k < report.dice.size(); ++k) {
        std::cout << "volume_pred_" << k << '=' << report.pred_volumes[k] << '\n';
        std::cout << "volume_truth_" << k << '=' << report.truth_volumes[k] << '\n';
      }
      std::vector<Label> pooled(volume_classes.begin(), volume_classes.end());
      if (pooled.empty()) {
        for (std::size_t k = 1; k < report.dice.size(); ++k) pooled.push_back(static_cast<Label>(k));
      }
      try {
        std::cout << "volume_consistency=" << volume_consistency(pred, truth, pooled) << '\n';
      } catch (const Error& e) {
        if (e.code() != Errc::ZeroVolume) throw;
        std::cout << "volume_consistency=undefined\n";
      }
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  }
  return kOk;
}
