// Command line front end: hyperparameter tuning, model training, one step
// prediction, free run simulation, and the two bundled experiments.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <sonig/config.hpp>
#include <sonig/errors.hpp>
#include <sonig/experiment.hpp>

namespace {

using json = nlohmann::json;
using namespace sonig;

Vector to_vector(const std::vector<double>& v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = v[i];
  return out;
}

std::vector<double> from_vector(const Vector& v) {
  return {v.data(), v.data() + v.size()};
}

json hyp_to_json(const Hyperparameters& hyp) {
  json j;
  j["alpha_sq"] = hyp.alpha_sq;
  j["lambda"] = from_vector(hyp.lambda_diag);
  j["sigma_n_sq"] = hyp.sigma_n_sq;
  j["sigma_x"] = from_vector(hyp.sigma_x_diag);
  return j;
}

Hyperparameters hyp_from_json(const json& j) {
  Hyperparameters hyp;
  hyp.alpha_sq = j.at("alpha_sq").get<double>();
  hyp.lambda_diag = to_vector(j.at("lambda").get<std::vector<double>>());
  hyp.sigma_n_sq = j.at("sigma_n_sq").get<double>();
  hyp.sigma_x_diag = to_vector(j.at("sigma_x").get<std::vector<double>>());
  hyp.validate();
  return hyp;
}

// Model bundle on disk: lag structure, kernel, inducing inputs, belief.
json model_to_json(const SonigModel& model, const NarxConfig& cfg) {
  json j;
  j["format"] = "sonig-model-v1";
  j["narx"] = {{"output_lags", cfg.output_lags},
               {"input_lags", cfg.input_lags},
               {"output_dim", cfg.output_dim},
               {"input_dim", cfg.input_dim},
               {"inducing_threshold", cfg.inducing_threshold}};
  const Matrix& xu = model.inducing_points();
  std::vector<std::vector<double>> points;
  points.reserve(static_cast<std::size_t>(xu.cols()));
  for (Eigen::Index i = 0; i < xu.cols(); ++i) {
    points.push_back(from_vector(xu.col(i)));
  }
  j["inducing"] = points;
  j["outputs"] = json::array();
  for (int k = 0; k < model.output_dim(); ++k) {
    const InducingSet& out = model.output(k);
    json jo;
    jo["hyp"] = hyp_to_json(out.hyp());
    jo["mean"] = from_vector(out.belief().mean);
    std::vector<std::vector<double>> cov;
    cov.reserve(static_cast<std::size_t>(out.belief().cov.rows()));
    for (Eigen::Index r = 0; r < out.belief().cov.rows(); ++r) {
      cov.push_back(from_vector(out.belief().cov.row(r)));
    }
    jo["cov"] = cov;
    j["outputs"].push_back(std::move(jo));
  }
  return j;
}

struct ModelBundle {
  NarxConfig cfg;
  SonigModel model;
};

ModelBundle model_from_json(const json& j) {
  if (j.value("format", "") != "sonig-model-v1") {
    throw InputError("model file: unknown format tag");
  }
  NarxConfig cfg;
  const json& jn = j.at("narx");
  cfg.output_lags = jn.at("output_lags").get<int>();
  cfg.input_lags = jn.at("input_lags").get<int>();
  cfg.output_dim = jn.at("output_dim").get<int>();
  cfg.input_dim = jn.at("input_dim").get<int>();
  cfg.inducing_threshold = jn.at("inducing_threshold").get<double>();
  cfg.validate();

  const auto points = j.at("inducing").get<std::vector<std::vector<double>>>();
  if (points.empty()) throw InputError("model file: no inducing points");
  Matrix xu(static_cast<Eigen::Index>(points.front().size()),
            static_cast<Eigen::Index>(points.size()));
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].size() != points.front().size()) {
      throw InputError("model file: ragged inducing point list");
    }
    xu.col(static_cast<Eigen::Index>(i)) = to_vector(points[i]);
  }

  std::vector<Hyperparameters> hyps;
  for (const json& jo : j.at("outputs")) hyps.push_back(hyp_from_json(jo.at("hyp")));
  ModelBundle bundle{cfg, SonigModel(xu, hyps)};

  int k = 0;
  for (const json& jo : j.at("outputs")) {
    GaussianBelief b;
    b.mean = to_vector(jo.at("mean").get<std::vector<double>>());
    const auto rows = jo.at("cov").get<std::vector<std::vector<double>>>();
    b.cov.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != rows.size()) throw InputError("model file: covariance not square");
      b.cov.row(static_cast<Eigen::Index>(r)) = to_vector(rows[r]).transpose();
    }
    bundle.model.output(k++).set_belief(std::move(b));
  }
  return bundle;
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InputError(path + ": " + e.what());
  }
  return j;
}

void save_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open " + path + " for writing");
  out << j.dump(2) << "\n";
}

void emit(const json& j, const std::string& format) {
  if (format == "json") {
    std::cout << j.dump(2) << std::endl;
    return;
  }
  // Flat key,value rows; list entries get an index suffix.
  for (const auto& [key, value] : j.items()) {
    if (value.is_array()) {
      int i = 0;
      for (const auto& entry : value) std::cout << key << "[" << i++ << "]," << entry.dump() << "\n";
    } else if (value.is_structured()) {
      std::cout << key << "," << value.dump() << "\n";
    } else if (value.is_string()) {
      std::cout << key << "," << value.get<std::string>() << "\n";
    } else {
      std::cout << key << "," << value.dump() << "\n";
    }
  }
  std::cout.flush();
}

// Lagged regressor matrix from a recorded signal: column k holds
// (y_k, ..., y_{k-ny+1}, u_k, ..., u_{k-nu+1}) and targets(k) = y_{k+1}.
void recorded_windows(const SignalData& data, int ny, int nu, Matrix& windows, Vector& targets) {
  if (ny < 0 || nu < 1) throw InputError("lags: need output_lags >= 0 and input_lags >= 1");
  const Eigen::Index start = std::max(ny, nu) - 1;
  const Eigen::Index count = data.size() - 1 - start;
  if (count < 2) throw InputError("signal too short for the requested lags");
  windows.resize(ny + nu, count);
  targets.resize(count);
  for (Eigen::Index i = 0; i < count; ++i) {
    const Eigen::Index k = start + i;
    for (int a = 0; a < ny; ++a) windows(a, i) = data.y(k - a);
    for (int a = 0; a < nu; ++a) windows(ny + a, i) = data.u(k - a);
    targets(i) = data.y(k + 1);
  }
}

struct TuneFlags {
  int subset = 200;
  int restarts = 2;
  int rounds = 3;
  int iters = 80;
  std::uint64_t seed = 0;
  bool no_sigma_x = false;

  TuneConfig to_config() const {
    TuneConfig cfg;
    cfg.subset_size = subset;
    cfg.restarts = restarts;
    cfg.fixed_point_iters = rounds;
    cfg.max_opt_iters = iters;
    cfg.seed = seed;
    cfg.tune_sigma_x = !no_sigma_x;
    return cfg;
  }
};

void add_tune_flags(CLI::App* cmd, TuneFlags& flags) {
  cmd->add_option("--subset", flags.subset, "Training subset size used for tuning");
  cmd->add_option("--restarts", flags.restarts, "Random restarts of the optimizer");
  cmd->add_option("--rounds", flags.rounds, "Slope refresh rounds");
  cmd->add_option("--iters", flags.iters, "Max optimizer iterations per round");
  cmd->add_option("--tune-seed", flags.seed, "Seed for subset choice and restarts");
  cmd->add_flag("--no-sigma-x", flags.no_sigma_x, "Pin input noise at zero (plain ML)");
}

Hyperparameters hyp_from_config(const KeyValueConfig& cfg, int dim) {
  Hyperparameters hyp;
  hyp.alpha_sq = cfg.get_double("alpha_sq");
  hyp.lambda_diag = to_vector(cfg.get_list("lambda"));
  hyp.sigma_n_sq = cfg.get_double("sigma_n_sq");
  hyp.sigma_x_diag = to_vector(cfg.get_list("sigma_x", std::vector<double>(
                                                           static_cast<std::size_t>(dim), 0.0)));
  if (hyp.lambda_diag.size() != dim) {
    throw InputError("config: lambda must list one entry per regressor slot");
  }
  hyp.validate();
  return hyp;
}

json trace_to_json(const std::vector<TraceRow>& rows) {
  json arr = json::array();
  for (const TraceRow& r : rows) {
    arr.push_back({{"t", r.t}, {"mean", r.mean}, {"lower95", r.lower95},
                   {"upper95", r.upper95}, {"truth", r.truth}});
  }
  return arr;
}

int cmd_tune(const std::string& data_path, double dt, int ny, int nu, const TuneFlags& flags,
             const std::string& format) {
  SignalData data = read_signal_csv(data_path);
  data.dt = dt;
  Matrix windows;
  Vector targets;
  recorded_windows(data, ny, nu, windows, targets);

  std::vector<double> rounds;
  const Hyperparameters hyp = tune_sod(windows, targets, flags.to_config(), &rounds);

  json out = hyp_to_json(hyp);
  out["objective_rounds"] = rounds;
  out["windows"] = windows.cols();
  emit(out, format);
  return 0;
}

int cmd_train(const std::string& data_path, double dt, int ny, int nu, double threshold,
              Eigen::Index train_count, const std::string& hyp_config_path, bool tune,
              const TuneFlags& flags, const std::string& model_out, const std::string& format) {
  SignalData data = read_signal_csv(data_path);
  data.dt = dt;

  NarxConfig cfg;
  cfg.output_lags = ny;
  cfg.input_lags = nu;
  cfg.inducing_threshold = threshold;
  cfg.validate();
  if (train_count <= 0 || train_count > data.size()) train_count = data.size();

  Hyperparameters hyp;
  if (tune) {
    SignalData prefix;
    prefix.u = data.u.head(train_count);
    prefix.y = data.y.head(train_count);
    Matrix windows;
    Vector targets;
    recorded_windows(prefix, ny, nu, windows, targets);
    hyp = tune_sod(windows, targets, flags.to_config());
  } else if (!hyp_config_path.empty()) {
    hyp = hyp_from_config(KeyValueConfig::load(hyp_config_path), cfg.regressor_size());
  } else {
    throw InputError("train: pass --hyp-config FILE or --tune");
  }
  if (hyp.sigma_x_diag.size() == 0) hyp.sigma_x_diag = Vector::Zero(cfg.regressor_size());

  const auto t0 = std::chrono::steady_clock::now();
  Vector first(cfg.regressor_size());
  const Eigen::Index start = std::max(ny, nu) - 1;
  for (int a = 0; a < ny; ++a) first(a) = data.y(start - a);
  for (int a = 0; a < nu; ++a) first(ny + a) = data.u(start - a);
  SonigModel model(first, {hyp});
  NarxState state(cfg);

  long updates = 0;
  Vector uk(1), yk(1);
  for (Eigen::Index k = 0; k + 1 < train_count; ++k) {
    uk << data.u(k);
    yk << data.y(k + 1);
    if (sysid_step(model, state, uk, yk, cfg).updated) ++updates;
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  save_json_file(model_out, model_to_json(model, cfg));
  json out;
  out["model"] = model_out;
  out["hyp"] = hyp_to_json(hyp);
  out["updates"] = updates;
  out["inducing_count"] = model.inducing_count();
  out["psd_repairs"] = model.psd_repairs;
  out["train_seconds"] = seconds;
  emit(out, format);
  return 0;
}

int cmd_predict(const std::string& model_path, const std::string& data_path, double dt,
                Eigen::Index skip, Eigen::Index count, const std::string& trace_out,
                const std::string& format) {
  ModelBundle bundle = model_from_json(load_json_file(model_path));
  if (bundle.cfg.output_dim != 1 || bundle.cfg.input_dim != 1) {
    throw InputError("predict: only scalar u,y signals are supported");
  }
  SignalData data = read_signal_csv(data_path);
  data.dt = dt;

  const int ny = bundle.cfg.output_lags;
  const int nu = bundle.cfg.input_lags;
  Matrix windows;
  Vector targets;
  recorded_windows(data, ny, nu, windows, targets);
  const Eigen::Index start = std::max(ny, nu) - 1;
  if (skip < 0 || skip >= windows.cols()) throw InputError("predict: --skip out of range");
  if (count <= 0 || skip + count > windows.cols()) count = windows.cols() - skip;

  Vector mean(count), variance(count), truth(count);
  std::vector<TraceRow> rows;
  rows.reserve(static_cast<std::size_t>(count));
  for (Eigen::Index i = 0; i < count; ++i) {
    const GaussianBelief p = inducing_predict(bundle.model.output(0), Matrix(windows.col(skip + i)));
    mean(i) = p.mean(0);
    variance(i) = p.cov(0, 0);
    truth(i) = targets(skip + i);
    TraceRow row;
    row.t = static_cast<double>(start + skip + i + 1) * (dt > 0.0 ? dt : 1.0);
    row.mean = mean(i);
    row.lower95 = mean(i) - 1.96 * std::sqrt(std::max(0.0, variance(i)));
    row.upper95 = mean(i) + 1.96 * std::sqrt(std::max(0.0, variance(i)));
    row.truth = truth(i);
    rows.push_back(row);
  }
  if (!trace_out.empty()) write_trace_csv(trace_out, rows);

  const RegressionMetrics m = evaluate_predictions(mean, variance, truth);
  json out;
  out["count"] = count;
  out["mse"] = m.mse;
  out["rmse"] = m.rmse;
  out["mean_variance"] = m.mean_variance;
  out["ratio"] = m.ratio;
  if (trace_out.empty() && format == "json") out["trace"] = trace_to_json(rows);
  emit(out, format);
  return 0;
}

int cmd_simulate(const std::string& model_path, const std::string& data_path, double dt,
                 Eigen::Index warm_count, bool no_propagate, const std::string& trace_out,
                 const std::string& format) {
  ModelBundle bundle = model_from_json(load_json_file(model_path));
  if (bundle.cfg.output_dim != 1 || bundle.cfg.input_dim != 1) {
    throw InputError("simulate: only scalar u,y signals are supported");
  }
  NarxConfig cfg = bundle.cfg;
  cfg.propagate_uncertainty = !no_propagate;
  SignalData data = read_signal_csv(data_path);
  data.dt = dt;

  const int warm_needed = std::max(cfg.output_lags, cfg.input_lags);
  if (warm_count < warm_needed) warm_count = warm_needed;
  if (warm_count + 1 >= data.size()) throw InputError("simulate: signal shorter than warm up");

  const Hyperparameters& hyp = bundle.model.output(0).hyp();
  NarxState state(cfg);
  for (Eigen::Index k = 0; k < warm_count; ++k) {
    Matrix u_cov(1, 1);
    u_cov(0, 0) = hyp.sigma_x_diag.size() > 0 ? hyp.sigma_x_diag(cfg.output_lags) : 0.0;
    state.push_input(data.u.segment(k, 1), u_cov);
    const Matrix y_cov = Matrix::Constant(1, 1, hyp.sigma_n_sq);
    state.push_output(data.y.segment(k + 1, 1), y_cov,
                      Matrix::Zero(1, cfg.regressor_size()));
  }

  const Eigen::Index steps = data.size() - 1 - warm_count;
  Matrix inputs(1, steps);
  inputs.row(0) = data.u.segment(warm_count, steps).transpose();
  const std::vector<GaussianBelief> preds = free_run_simulate(bundle.model, state, inputs, cfg);

  Vector mean(steps), truth(steps);
  std::vector<TraceRow> rows;
  rows.reserve(static_cast<std::size_t>(steps));
  for (Eigen::Index i = 0; i < steps; ++i) {
    const GaussianBelief& p = preds[static_cast<std::size_t>(i)];
    mean(i) = p.mean(0);
    truth(i) = data.y(warm_count + 1 + i);
    TraceRow row;
    row.t = static_cast<double>(warm_count + 1 + i) * (dt > 0.0 ? dt : 1.0);
    row.mean = p.mean(0);
    row.lower95 = p.mean(0) - 1.96 * std::sqrt(std::max(0.0, p.cov(0, 0)));
    row.upper95 = p.mean(0) + 1.96 * std::sqrt(std::max(0.0, p.cov(0, 0)));
    row.truth = truth(i);
    rows.push_back(row);
  }
  if (!trace_out.empty()) write_trace_csv(trace_out, rows);

  json out;
  out["steps"] = steps;
  out["rmse"] = root_mean_square_error(mean, truth);
  if (trace_out.empty() && format == "json") out["trace"] = trace_to_json(rows);
  emit(out, format);
  return 0;
}

int cmd_experiment_sample(const std::string& config_path, int repeats, std::uint64_t seed,
                          const std::vector<int>& methods, const std::string& format) {
  SampleExperimentConfig cfg;
  if (!config_path.empty()) {
    const KeyValueConfig file = KeyValueConfig::load(config_path);
    cfg.repeats = file.get_int("repeats", cfg.repeats);
    cfg.seed = static_cast<std::uint64_t>(file.get_int("seed", static_cast<int>(cfg.seed)));
    if (file.has("methods")) {
      cfg.methods.clear();
      for (double m : file.get_list("methods")) cfg.methods.push_back(static_cast<int>(m));
    }
    cfg.train_small = file.get_int("train_small", cfg.train_small);
    cfg.train_large = file.get_int("train_large", cfg.train_large);
    cfg.init_subset = file.get_int("init_subset", cfg.init_subset);
    cfg.input_noise = file.get_double("input_noise", cfg.input_noise);
    cfg.output_noise = file.get_double("output_noise", cfg.output_noise);
    cfg.second_order_mean = file.get_bool("second_order_mean", cfg.second_order_mean);
    cfg.tune.subset_size = file.get_int("tune_subset", cfg.tune.subset_size);
    cfg.tune.restarts = file.get_int("tune_restarts", cfg.tune.restarts);
    cfg.tune.fixed_point_iters = file.get_int("tune_rounds", cfg.tune.fixed_point_iters);
    cfg.tune.max_opt_iters = file.get_int("tune_iters", cfg.tune.max_opt_iters);
  }
  if (repeats > 0) cfg.repeats = repeats;
  if (seed > 0) cfg.seed = seed;
  if (!methods.empty()) cfg.methods = methods;

  const SampleExperimentReport report = run_sample_experiment(cfg);
  if (format == "csv") {
    std::cout << "method,label,mse,mean_variance,ratio\n";
    for (const MethodSummary& m : report.methods) {
      std::cout << m.method << "," << m.label << "," << m.mse << "," << m.mean_variance << ","
                << m.ratio << "\n";
    }
    std::cout.flush();
    return 0;
  }
  json out;
  out["repeats"] = report.repeats;
  out["seed"] = report.seed;
  json rows = json::array();
  for (const MethodSummary& m : report.methods) {
    rows.push_back({{"method", m.method}, {"label", m.label}, {"mse", m.mse},
                    {"mean_variance", m.mean_variance}, {"ratio", m.ratio}});
  }
  out["methods"] = rows;
  emit(out, format);
  return 0;
}

int cmd_experiment_narx(const std::string& data_path, double dt, Eigen::Index synthetic,
                        std::uint64_t seed, const std::string& config_path,
                        const std::string& trace_out, const std::string& format) {
  SignalData data;
  if (!data_path.empty()) {
    data = read_signal_csv(data_path);
    data.dt = dt;
  } else {
    data = make_synthetic_narx_data(synthetic, seed);
  }

  NarxExperimentConfig cfg;
  cfg.dt = dt;
  if (!config_path.empty()) {
    const KeyValueConfig file = KeyValueConfig::load(config_path);
    cfg.narx.output_lags = file.get_int("output_lags", cfg.narx.output_lags);
    cfg.narx.input_lags = file.get_int("input_lags", cfg.narx.input_lags);
    cfg.narx.inducing_threshold =
        file.get_double("inducing_threshold", cfg.narx.inducing_threshold);
    cfg.train_count = file.get_int("train", static_cast<int>(cfg.train_count));
    cfg.eval_count = file.get_int("eval", static_cast<int>(cfg.eval_count));
    cfg.tune = file.get_bool("tune", cfg.tune);
    cfg.tune_cfg.subset_size = file.get_int("tune_subset", cfg.tune_cfg.subset_size);
    cfg.tune_cfg.restarts = file.get_int("tune_restarts", cfg.tune_cfg.restarts);
    cfg.tune_cfg.fixed_point_iters = file.get_int("tune_rounds", cfg.tune_cfg.fixed_point_iters);
    cfg.tune_cfg.max_opt_iters = file.get_int("tune_iters", cfg.tune_cfg.max_opt_iters);
    cfg.tune_cfg.seed = static_cast<std::uint64_t>(
        file.get_int("tune_seed", static_cast<int>(cfg.tune_cfg.seed)));
    if (!cfg.tune) {
      KeyValueConfig hyp_cfg = file;
      cfg.hyp = hyp_from_config(hyp_cfg, cfg.narx.regressor_size());
    }
  }
  if (cfg.train_count + cfg.eval_count + 1 > data.size()) {
    // Shrink the evaluation stretch rather than rejecting slightly short files.
    cfg.eval_count = data.size() - 1 - cfg.train_count;
  }

  const NarxExperimentResult res = run_narx_experiment(data, cfg);
  if (!trace_out.empty()) write_trace_csv(trace_out, res.trace);

  json out;
  out["source"] = data_path.empty() ? "synthetic" : data_path;
  out["train"] = cfg.train_count;
  out["eval"] = cfg.eval_count;
  out["one_step_rmse"] = res.one_step_rmse;
  out["free_run_rmse"] = res.free_run_rmse;
  out["inducing_count"] = res.inducing_count;
  out["train_seconds"] = res.train_seconds;
  out["psd_repairs"] = res.psd_repairs;
  emit(out, format);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online sparse Gaussian process regression with noisy inputs"};
  app.require_subcommand(1);

  std::string format = "json";
  app.add_option("--output", format, "Output format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();

  // tune
  auto* tune = app.add_subcommand("tune", "Tune kernel and noise hyperparameters on a signal");
  std::string tune_data;
  double tune_dt = 0.0;
  int tune_ny = 1, tune_nu = 1;
  TuneFlags tune_flags;
  tune->add_option("--data", tune_data, "Signal CSV with a u,y header")->required();
  tune->add_option("--dt", tune_dt, "Sample period in seconds");
  tune->add_option("--lags-y", tune_ny, "Past outputs per regressor");
  tune->add_option("--lags-u", tune_nu, "Past inputs per regressor");
  add_tune_flags(tune, tune_flags);

  // train
  auto* train = app.add_subcommand("train", "Stream a signal prefix into a model and save it");
  std::string train_data, train_hyp_config, train_model_out = "model.json";
  double train_dt = 0.0, train_threshold = 1.0;
  int train_ny = 1, train_nu = 1;
  Eigen::Index train_count = 0;
  bool train_tune = false;
  TuneFlags train_tune_flags;
  train->add_option("--data", train_data, "Signal CSV with a u,y header")->required();
  train->add_option("--dt", train_dt, "Sample period in seconds");
  train->add_option("--lags-y", train_ny, "Past outputs per regressor");
  train->add_option("--lags-u", train_nu, "Past inputs per regressor");
  train->add_option("--threshold", train_threshold,
                    "Normalized squared distance that spawns a new inducing point");
  train->add_option("--train", train_count, "Samples to stream (default: whole file)");
  train->add_option("--hyp-config", train_hyp_config,
                    "Key value file with alpha_sq, lambda, sigma_n_sq, sigma_x");
  train->add_flag("--tune", train_tune, "Tune hyperparameters on the training prefix first");
  train->add_option("--model-out", train_model_out, "Where to write the model")
      ->capture_default_str();
  add_tune_flags(train, train_tune_flags);

  // predict
  auto* predict = app.add_subcommand("predict", "One step predictions over recorded windows");
  std::string predict_model, predict_data, predict_trace;
  double predict_dt = 0.0;
  Eigen::Index predict_skip = 0, predict_count = 0;
  predict->add_option("--model", predict_model, "Model JSON from train")->required();
  predict->add_option("--data", predict_data, "Signal CSV with a u,y header")->required();
  predict->add_option("--dt", predict_dt, "Sample period in seconds");
  predict->add_option("--skip", predict_skip, "Windows to skip from the start");
  predict->add_option("--count", predict_count, "Windows to evaluate (default: rest)");
  predict->add_option("--trace-out", predict_trace, "Write t,mean,lower95,upper95,truth CSV");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Free run the model over recorded inputs");
  std::string sim_model, sim_data, sim_trace;
  double sim_dt = 0.0;
  Eigen::Index sim_warm = 0;
  bool sim_no_prop = false;
  simulate->add_option("--model", sim_model, "Model JSON from train")->required();
  simulate->add_option("--data", sim_data, "Signal CSV with a u,y header")->required();
  simulate->add_option("--dt", sim_dt, "Sample period in seconds");
  simulate->add_option("--warm", sim_warm, "Recorded samples used to fill the lag window");
  simulate->add_flag("--no-propagate", sim_no_prop,
                     "Do not feed predictive uncertainty back into the window");
  simulate->add_option("--trace-out", sim_trace, "Write t,mean,lower95,upper95,truth CSV");

  // experiment
  auto* experiment = app.add_subcommand("experiment", "Bundled studies");
  experiment->require_subcommand(1);

  auto* exp_sample = experiment->add_subcommand(
      "sample-function", "Repeated regression study on random smooth functions");
  std::string exp_sample_config;
  int exp_sample_repeats = 0;
  std::uint64_t exp_sample_seed = 0;
  std::vector<int> exp_sample_methods;
  exp_sample->add_option("--config", exp_sample_config, "Key value config file");
  exp_sample->add_option("--repeats", exp_sample_repeats, "Repeat count override");
  exp_sample->add_option("--seed", exp_sample_seed, "Seed override");
  exp_sample->add_option("--methods", exp_sample_methods, "Method ids to run (1..7)");

  auto* exp_narx = experiment->add_subcommand(
      "narx", "System identification study on a recorded or synthetic signal");
  std::string exp_narx_data, exp_narx_config, exp_narx_trace;
  double exp_narx_dt = 0.05;
  Eigen::Index exp_narx_synth = 3500;
  std::uint64_t exp_narx_seed = 1;
  exp_narx->add_option("--data", exp_narx_data, "Signal CSV (omit to use a synthetic signal)");
  exp_narx->add_option("--dt", exp_narx_dt, "Sample period in seconds")->capture_default_str();
  exp_narx->add_option("--synthetic", exp_narx_synth, "Synthetic signal length")
      ->capture_default_str();
  exp_narx->add_option("--seed", exp_narx_seed, "Synthetic signal seed")->capture_default_str();
  exp_narx->add_option("--config", exp_narx_config, "Key value config file");
  exp_narx->add_option("--trace-out", exp_narx_trace, "Write t,mean,lower95,upper95,truth CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*tune) {
      return cmd_tune(tune_data, tune_dt, tune_ny, tune_nu, tune_flags, format);
    }
    if (*train) {
      return cmd_train(train_data, train_dt, train_ny, train_nu, train_threshold, train_count,
                       train_hyp_config, train_tune, train_tune_flags, train_model_out, format);
    }
    if (*predict) {
      return cmd_predict(predict_model, predict_data, predict_dt, predict_skip, predict_count,
                         predict_trace, format);
    }
    if (*simulate) {
      return cmd_simulate(sim_model, sim_data, sim_dt, sim_warm, sim_no_prop, sim_trace, format);
    }
    if (*exp_sample) {
      return cmd_experiment_sample(exp_sample_config, exp_sample_repeats, exp_sample_seed,
                                   exp_sample_methods, format);
    }
    if (*exp_narx) {
      return cmd_experiment_narx(exp_narx_data, exp_narx_dt, exp_narx_synth, exp_narx_seed,
                                 exp_narx_config, exp_narx_trace, format);
    }
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << std::endl;
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << std::endl;
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
  return 0;
}
