#pragma once

#include "sonig/dataset.hpp"
#include "sonig/hypertune.hpp"
#include "sonig/metrics.hpp"
#include "sonig/narx.hpp"

namespace sonig {

// Repeated study on random smooth functions: several regression methods see
// the same noisy samples of each function and are scored on a noise free
// evaluation grid. Method ids:
//   1 exact GP with the generating hyperparameters and noise free inputs
//   2 exact GP, maximum likelihood hyperparameters, noisy inputs
//   3 slope corrected GP (input noise aware), own tuning
//   4 online noisy input sparse GP on the small training set, hyp from 3
//   5 online noisy input sparse GP on the large training set, hyp from 3
//   6 method 3 on a small subset for initialization, then method 4 on the rest
//   7 batch sparse GP on the large training set, hyp from 2
struct SampleExperimentConfig {
  int repeats{50};
  std::uint64_t seed{1};
  std::vector<int> methods{1, 2, 3, 4, 5, 6, 7};

  int train_small{200};
  int train_large{800};
  int init_subset{100};
  double input_noise{0.4};   // standard deviation of the input distortion
  double output_noise{0.1};  // standard deviation of the output distortion

  double domain_lo{-5.0};
  double domain_hi{5.0};
  double sample_grid_spacing{0.01};
  double test_grid_spacing{0.05};
  double inducing_spacing{0.5};

  bool second_order_mean{true};
  TuneConfig tune;
};

struct MethodSummary {
  int method{0};
  std::string label;
  double mse{0.0};
  double mean_variance{0.0};
  double ratio{0.0};
};

struct SampleExperimentReport {
  int repeats{0};
  std::uint64_t seed{0};
  std::vector<MethodSummary> methods;
};

SampleExperimentReport run_sample_experiment(const SampleExperimentConfig& cfg);

// System identification study on one input/output signal: train on a prefix
// with the online noisy input model, then free run simulate the following
// stretch and compare against the recorded output.
struct NarxExperimentConfig {
  NarxConfig narx;
  Eigen::Index train_count{2000};
  Eigen::Index eval_count{1499};
  double dt{0.05};
  bool tune{true};
  TuneConfig tune_cfg;
  Hyperparameters hyp;  // used verbatim when tune is false
};

struct NarxExperimentResult {
  double free_run_rmse{0.0};
  double one_step_rmse{0.0};
  Eigen::Index inducing_count{0};
  double train_seconds{0.0};
  long psd_repairs{0};
  std::vector<TraceRow> trace;  // free run with 95% bands against the recording
};

NarxExperimentResult run_narx_experiment(const SignalData& data, const NarxExperimentConfig& cfg);

// Synthetic nonlinear benchmark signal for exercising the identification
// pipeline when no recorded dataset is available. Measurement noise is baked
// into both channels.
SignalData make_synthetic_narx_data(Eigen::Index count, std::uint64_t seed);

}  // namespace sonig
