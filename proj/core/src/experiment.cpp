#include "sonig/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <random>

#include "sonig/errors.hpp"
#include "sonig/sample_function.hpp"

namespace sonig {

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

struct RepeatData {
  Vector x_true;
  Vector x_noisy;
  Vector y_noisy;
  Vector test_x;
  Vector test_truth;
};

RepeatData draw_repeat(const SampleExperimentConfig& cfg, const GpFunctionSampler& sampler,
                       int repeat) {
  RepeatData out;
  const SampledFunction fn = sampler.sample(mix_seed(cfg.seed, 2 * repeat));
  std::mt19937_64 rng(mix_seed(cfg.seed, 2 * repeat + 1));
  std::uniform_real_distribution<double> uniform(cfg.domain_lo, cfg.domain_hi);
  std::normal_distribution<double> normal(0.0, 1.0);

  const int n = cfg.train_large;
  out.x_true.resize(n);
  out.x_noisy.resize(n);
  out.y_noisy.resize(n);
  for (int i = 0; i < n; ++i) {
    out.x_true(i) = uniform(rng);
    out.y_noisy(i) = fn(out.x_true(i)) + cfg.output_noise * normal(rng);
    out.x_noisy(i) = out.x_true(i) + cfg.input_noise * normal(rng);
  }

  const Eigen::Index m = static_cast<Eigen::Index>(
                             std::round((cfg.domain_hi - cfg.domain_lo) / cfg.test_grid_spacing)) +
                         1;
  out.test_x = Vector::LinSpaced(m, cfg.domain_lo, cfg.domain_hi);
  out.test_truth.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) out.test_truth(i) = fn(out.test_x(i));
  return out;
}

Matrix as_row(const Vector& v) {
  Matrix out(1, v.size());
  out.row(0) = v.transpose();
  return out;
}

// Streams one sample at a time into a single output model.
SonigModel stream_updates(const Vector& x_noisy, const Vector& y_noisy, Eigen::Index from,
                          Eigen::Index to, const Hyperparameters& hyp, const Matrix& xu,
                          const SonigOptions& opts, const GaussianBelief* init) {
  SonigModel model(xu, {hyp});
  if (init) model.output(0).set_belief(*init);
  NoisyMeasurement meas;
  meas.sigma_x = hyp.sigma_x();
  meas.sigma_f_diag = Vector::Constant(1, hyp.sigma_n_sq);
  meas.x_hat.resize(1);
  meas.y_hat.resize(1);
  for (Eigen::Index i = from; i < to; ++i) {
    meas.x_hat(0) = x_noisy(i);
    meas.y_hat(0) = y_noisy(i);
    sonig_update(model, meas, opts);
  }
  return model;
}

RegressionMetrics score(const GaussianBelief& pred, const Vector& truth) {
  return evaluate_predictions(pred.mean, pred.cov.diagonal(), truth);
}

}  // namespace

SampleExperimentReport run_sample_experiment(const SampleExperimentConfig& cfg) {
  if (cfg.repeats < 1) throw InputError("run_sample_experiment: repeats must be positive");
  if (cfg.train_small > cfg.train_large) {
    throw InputError("run_sample_experiment: train_small cannot exceed train_large");
  }
  if (cfg.init_subset >= cfg.train_large) {
    throw InputError("run_sample_experiment: init_subset must leave samples to stream");
  }
  for (int m : cfg.methods) {
    if (m < 1 || m > 7) throw InputError("run_sample_experiment: unknown method id");
  }

  const Hyperparameters generator =
      Hyperparameters::isotropic(1, 1.0, 1.0, cfg.output_noise * cfg.output_noise);
  const GpFunctionSampler sampler(cfg.domain_lo, cfg.domain_hi, cfg.sample_grid_spacing,
                                  generator);

  const Eigen::Index n_xu = static_cast<Eigen::Index>(std::round(
                                (cfg.domain_hi - cfg.domain_lo) / cfg.inducing_spacing)) +
                            1;
  Matrix xu(1, n_xu);
  xu.row(0) = Vector::LinSpaced(n_xu, cfg.domain_lo, cfg.domain_hi).transpose();

  SonigOptions opts;
  opts.second_order_mean = cfg.second_order_mean;

  const bool need_ml_hyp =
      std::count(cfg.methods.begin(), cfg.methods.end(), 2) ||
      std::count(cfg.methods.begin(), cfg.methods.end(), 7);
  const bool need_nigp_hyp =
      std::count(cfg.methods.begin(), cfg.methods.end(), 3) ||
      std::count(cfg.methods.begin(), cfg.methods.end(), 4) ||
      std::count(cfg.methods.begin(), cfg.methods.end(), 5);

  struct Accum {
    double mse{0.0};
    double var{0.0};
  };
  std::map<int, Accum> totals;

  for (int rep = 0; rep < cfg.repeats; ++rep) {
    const RepeatData data = draw_repeat(cfg, sampler, rep);
    const Eigen::Index ns = cfg.train_small;
    const Eigen::Index nl = cfg.train_large;
    const Matrix x_true_s = as_row(data.x_true.head(ns));
    const Matrix x_noisy_s = as_row(data.x_noisy.head(ns));
    const Matrix x_noisy_l = as_row(data.x_noisy);
    const Matrix test = as_row(data.test_x);

    Hyperparameters ml_hyp, nigp_hyp;
    if (need_ml_hyp) {
      TuneConfig tc = cfg.tune;
      tc.tune_sigma_x = false;
      tc.fixed_point_iters = 1;
      tc.seed = mix_seed(cfg.seed, 1000000 + 3 * rep);
      ml_hyp = tune_sod(x_noisy_s, data.y_noisy.head(ns), tc);
    }
    if (need_nigp_hyp) {
      TuneConfig tc = cfg.tune;
      tc.tune_sigma_x = true;
      tc.seed = mix_seed(cfg.seed, 1000001 + 3 * rep);
      nigp_hyp = tune_sod(x_noisy_s, data.y_noisy.head(ns), tc);
    }

    for (int method : cfg.methods) {
      RegressionMetrics metrics;
      switch (method) {
        case 1: {
          metrics = score(
              exact_gp_posterior(x_true_s, data.y_noisy.head(ns), test, generator),
              data.test_truth);
          break;
        }
        case 2: {
          metrics = score(exact_gp_posterior(x_noisy_s, data.y_noisy.head(ns), test, ml_hyp),
                          data.test_truth);
          break;
        }
        case 3: {
          metrics = score(nigp_predict(x_noisy_s, data.y_noisy.head(ns), nigp_hyp, test),
                          data.test_truth);
          break;
        }
        case 4: {
          const SonigModel model =
              stream_updates(data.x_noisy, data.y_noisy, 0, ns, nigp_hyp, xu, opts, nullptr);
          metrics = score(inducing_predict(model.output(0), test), data.test_truth);
          break;
        }
        case 5: {
          const SonigModel model =
              stream_updates(data.x_noisy, data.y_noisy, 0, nl, nigp_hyp, xu, opts, nullptr);
          metrics = score(inducing_predict(model.output(0), test), data.test_truth);
          break;
        }
        case 6: {
          TuneConfig tc = cfg.tune;
          tc.tune_sigma_x = true;
          tc.subset_size = std::min(tc.subset_size, cfg.init_subset);
          tc.seed = mix_seed(cfg.seed, 1000002 + 3 * rep);
          const Eigen::Index ni = cfg.init_subset;
          const Matrix x_init = as_row(data.x_noisy.head(ni));
          const Hyperparameters hyp6 = tune_sod(x_init, data.y_noisy.head(ni), tc);
          const GaussianBelief init =
              nigp_predict(x_init, data.y_noisy.head(ni), hyp6, xu);
          const SonigModel model =
              stream_updates(data.x_noisy, data.y_noisy, ni, nl, hyp6, xu, opts, &init);
          metrics = score(inducing_predict(model.output(0), test), data.test_truth);
          break;
        }
        case 7: {
          const InducingSet fitc = fitc_batch(x_noisy_l, data.y_noisy, xu, ml_hyp);
          metrics = score(inducing_predict(fitc, test), data.test_truth);
          break;
        }
        default:
          throw InputError("run_sample_experiment: unknown method id");
      }
      totals[method].mse += metrics.mse;
      totals[method].var += metrics.mean_variance;
    }
  }

  static const std::map<int, std::string> labels = {
      {1, "gp_true_hyp"}, {2, "gp_ml"},           {3, "nigp"},      {4, "sonig_small"},
      {5, "sonig_large"}, {6, "nigp_init_sonig"}, {7, "fitc_large"}};

  SampleExperimentReport report;
  report.repeats = cfg.repeats;
  report.seed = cfg.seed;
  for (int method : cfg.methods) {
    MethodSummary s;
    s.method = method;
    s.label = labels.at(method);
    s.mse = totals[method].mse / cfg.repeats;
    s.mean_variance = totals[method].var / cfg.repeats;
    s.ratio = s.mean_variance > 0.0 ? s.mse / s.mean_variance
                                    : std::numeric_limits<double>::infinity();
    report.methods.push_back(std::move(s));
  }
  return report;
}

namespace {

// Deterministic regressor from recorded samples: step k pairs the window
// (y_k, ..., u_k, ...) with the target y_{k+1}.
Vector recorded_regressor(const SignalData& data, const NarxConfig& cfg, Eigen::Index k) {
  Vector x(cfg.regressor_size());
  Eigen::Index at = 0;
  for (int j = 0; j < cfg.output_lags; ++j) x(at++) = data.y(k - j);
  for (int j = 0; j < cfg.input_lags; ++j) x(at++) = data.u(k - j);
  return x;
}

}  // namespace

NarxExperimentResult run_narx_experiment(const SignalData& data, const NarxExperimentConfig& cfg) {
  cfg.narx.validate();
  if (cfg.narx.input_dim != 1 || cfg.narx.output_dim != 1) {
    throw InputError("run_narx_experiment: expects scalar signals");
  }
  const Eigen::Index warm = std::max(cfg.narx.output_lags, cfg.narx.input_lags);
  if (data.size() < cfg.train_count + cfg.eval_count + 1) {
    throw InputError("run_narx_experiment: dataset too short for the requested split");
  }
  if (cfg.train_count < warm + 10) throw InputError("run_narx_experiment: training split too short");

  const int d = cfg.narx.regressor_size();

  // Hyperparameters: tuned on recorded regressor/target pairs, or supplied.
  Hyperparameters hyp;
  if (cfg.tune) {
    const Eigen::Index pairs = cfg.train_count - warm;
    Matrix X(d, pairs);
    Vector t(pairs);
    for (Eigen::Index i = 0; i < pairs; ++i) {
      const Eigen::Index k = warm - 1 + i;
      X.col(i) = recorded_regressor(data, cfg.narx, k);
      t(i) = data.y(k + 1);
    }
    hyp = tune_sod(X, t, cfg.tune_cfg);
  } else {
    hyp = cfg.hyp;
    hyp.validate();
    if (hyp.input_dim() != d) {
      throw InputError("run_narx_experiment: hyperparameter dimension does not match the lags");
    }
  }
  if (hyp.sigma_x_diag.size() == 0) hyp.sigma_x_diag = Vector::Zero(d);

  NarxExperimentResult result;

  // Train online; the first regressor that comes out of the warm up seeds the
  // inducing set.
  const auto t0 = std::chrono::steady_clock::now();
  SonigModel model(recorded_regressor(data, cfg.narx, warm - 1), {hyp});
  NarxState state(cfg.narx);
  Vector u(1), y(1);
  for (Eigen::Index k = 0; k < cfg.train_count; ++k) {
    u(0) = data.u(k);
    y(0) = data.y(k + 1);
    sysid_step(model, state, u, y, cfg.narx);
  }
  result.train_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  result.inducing_count = model.inducing_count();
  result.psd_repairs = model.psd_repairs;

  // One step ahead accuracy over the evaluation stretch, on recorded windows.
  {
    Vector pred(cfg.eval_count), truth(cfg.eval_count);
    for (Eigen::Index i = 0; i < cfg.eval_count; ++i) {
      const Eigen::Index k = cfg.train_count + i;
      const GaussianBelief p = inducing_predict(model.output(0), recorded_regressor(data, cfg.narx, k));
      pred(i) = p.mean(0);
      truth(i) = data.y(k + 1);
    }
    result.one_step_rmse = root_mean_square_error(pred, truth);
  }

  // Free run over the same stretch: warm the window from recorded samples
  // right before the boundary, then only the inputs are revealed.
  {
    NarxState free_state(cfg.narx);
    const Matrix u_cov = hyp.sigma_x()
                             .block(cfg.narx.output_lags * cfg.narx.output_dim,
                                    cfg.narx.output_lags * cfg.narx.output_dim, 1, 1);
    const Matrix y_cov = Matrix::Constant(1, 1, hyp.sigma_n_sq);
    for (Eigen::Index k = cfg.train_count - warm; k < cfg.train_count; ++k) {
      free_state.push_input(data.u.segment(k, 1), u_cov);
      free_state.push_output(data.y.segment(k + 1, 1), y_cov,
                             Matrix::Zero(1, d));
    }
    Matrix inputs(1, cfg.eval_count);
    inputs.row(0) = data.u.segment(cfg.train_count, cfg.eval_count).transpose();
    const std::vector<GaussianBelief> preds = free_run_simulate(model, free_state, inputs, cfg.narx);

    Vector pred(cfg.eval_count), truth(cfg.eval_count);
    result.trace.reserve(static_cast<std::size_t>(cfg.eval_count));
    for (Eigen::Index i = 0; i < cfg.eval_count; ++i) {
      const Eigen::Index k = cfg.train_count + i;
      pred(i) = preds[static_cast<std::size_t>(i)].mean(0);
      truth(i) = data.y(k + 1);
      const double sd = std::sqrt(std::max(preds[static_cast<std::size_t>(i)].cov(0, 0), 0.0));
      TraceRow row;
      row.t = static_cast<double>(k + 1) * cfg.dt;
      row.mean = pred(i);
      row.lower95 = pred(i) - 1.96 * sd;
      row.upper95 = pred(i) + 1.96 * sd;
      row.truth = truth(i);
      result.trace.push_back(row);
    }
    result.free_run_rmse = root_mean_square_error(pred, truth);
  }
  return result;
}

SignalData make_synthetic_narx_data(Eigen::Index count, std::uint64_t seed) {
  if (count < 10) throw InputError("make_synthetic_narx_data: count too small");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double dt = 0.05;

  SignalData out;
  out.dt = dt;
  out.u.resize(count);
  out.y.resize(count);

  Vector u_true(count), y_true(count);
  for (Eigen::Index k = 0; k < count; ++k) {
    const double t = static_cast<double>(k) * dt;
    u_true(k) = 2.0 * std::sin(0.9 * t) + 1.2 * std::sin(0.23 * t + 0.7) +
                0.8 * std::sin(1.7 * t + 2.1);
  }
  y_true(0) = 0.0;
  for (Eigen::Index k = 0; k + 1 < count; ++k) {
    const double u0 = u_true(k);
    const double u1 = k >= 1 ? u_true(k - 1) : 0.0;
    const double u2 = k >= 2 ? u_true(k - 2) : 0.0;
    y_true(k + 1) = 0.6 * y_true(k) + 15.0 * std::tanh(0.7 * u0) - 8.0 * std::tanh(0.4 * u1) +
                    3.0 * u2;
  }
  for (Eigen::Index k = 0; k < count; ++k) {
    out.u(k) = u_true(k) + 0.1 * normal(rng);
    out.y(k) = y_true(k) + 2.0 * normal(rng);
  }
  return out;
}

}  // namespace sonig
