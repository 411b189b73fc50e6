#include <sonig/experiment.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <sonig/config.hpp>
#include <sonig/errors.hpp>
#include <sonig/sample_function.hpp>

namespace sonig {
namespace {

std::string temp_path(const std::string& name) { return ::testing::TempDir() + name; }

TEST(Metrics, HandComputedValues) {
  Vector mean(2), var(2), truth(2);
  mean << 1.0, 2.0;
  var << 0.5, 1.5;
  truth << 2.0, 4.0;
  const RegressionMetrics m = evaluate_predictions(mean, var, truth);
  EXPECT_NEAR(m.mse, 2.5, 1e-15);
  EXPECT_NEAR(m.rmse, std::sqrt(2.5), 1e-15);
  EXPECT_NEAR(m.mean_variance, 1.0, 1e-15);
  EXPECT_NEAR(m.ratio, 2.5, 1e-15);

  EXPECT_THROW(evaluate_predictions(mean, var, Vector::Zero(3)), InputError);
  EXPECT_THROW(evaluate_predictions(Vector(), Vector(), Vector()), InputError);
  EXPECT_NEAR(root_mean_square_error(mean, truth), std::sqrt(2.5), 1e-15);
  EXPECT_THROW(root_mean_square_error(mean, Vector::Zero(3)), InputError);
}

TEST(FunctionSampler, DeterministicAndCalibrated) {
  const Hyperparameters hyp = Hyperparameters::isotropic(1, 2.0, 1.0, 0.01);
  const GpFunctionSampler sampler(-5.0, 5.0, 0.05, hyp);

  const SampledFunction a = sampler.sample(11);
  const SampledFunction b = sampler.sample(11);
  const SampledFunction c = sampler.sample(12);
  EXPECT_EQ((a.values - b.values).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_GT((a.values - c.values).cwiseAbs().maxCoeff(), 0.0);

  // Marginal variance of the draws should track the prior amplitude.
  double acc = 0.0;
  const int n = 300;
  for (int s = 0; s < n; ++s) {
    const SampledFunction f = sampler.sample(static_cast<std::uint64_t>(100 + s));
    const double v = f(0.37);
    acc += v * v;
  }
  EXPECT_NEAR(acc / n, hyp.alpha_sq, 0.3 * hyp.alpha_sq);

  // Clamped extrapolation outside the grid.
  EXPECT_EQ(a(-100.0), a.values(0));
  EXPECT_EQ(a(100.0), a.values(a.values.size() - 1));

  EXPECT_THROW(GpFunctionSampler(1.0, -1.0, 0.1, hyp), InputError);
  EXPECT_THROW(GpFunctionSampler(-1.0, 1.0, 0.1, Hyperparameters::isotropic(2, 1.0, 1.0, 0.0)),
               InputError);
}

TEST(Config, ParsesTypedValues) {
  std::stringstream in(
      "# comment line\n"
      "alpha = 2.5\n"
      "count = 40\n"
      "flag = true\n"
      "name = damper\n"
      "lambda = 1.0, 2.0, 3.0  # trailing comment\n"
      "\n");
  const KeyValueConfig cfg = KeyValueConfig::parse(in);
  EXPECT_DOUBLE_EQ(cfg.get_double("alpha"), 2.5);
  EXPECT_EQ(cfg.get_int("count"), 40);
  EXPECT_TRUE(cfg.get_bool("flag", false));
  EXPECT_EQ(cfg.get_string("name", ""), "damper");
  const std::vector<double> lambda = cfg.get_list("lambda");
  ASSERT_EQ(lambda.size(), 3u);
  EXPECT_DOUBLE_EQ(lambda[1], 2.0);

  EXPECT_DOUBLE_EQ(cfg.get_double("missing", 7.0), 7.0);
  EXPECT_FALSE(cfg.get_bool("missing", false));
  EXPECT_THROW(cfg.get_double("missing"), InputError);
  EXPECT_THROW(cfg.get_int("alpha"), InputError);
  EXPECT_THROW(cfg.get_bool("name", false), InputError);

  std::stringstream bad("just a line without equals\n");
  EXPECT_THROW(KeyValueConfig::parse(bad), InputError);
  std::stringstream empty_key(" = 3\n");
  EXPECT_THROW(KeyValueConfig::parse(empty_key), InputError);
  EXPECT_THROW(KeyValueConfig::load(temp_path("does_not_exist.cfg")), InputError);
}

TEST(Dataset, RoundTripsSignals) {
  SignalData data;
  data.u = Vector::LinSpaced(5, -1.0, 1.0);
  data.y.resize(5);
  data.y << 0.5, -0.25, 0.125, 3.0, -7.5;
  const std::string path = temp_path("signal.csv");
  write_signal_csv(path, data);
  const SignalData back = read_signal_csv(path);
  ASSERT_EQ(back.size(), 5);
  EXPECT_LT((back.u - data.u).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT((back.y - data.y).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Dataset, RejectsMalformedFiles) {
  EXPECT_THROW(read_signal_csv(temp_path("missing.csv")), InputError);

  const std::string bad_header = temp_path("bad_header.csv");
  std::ofstream(bad_header) << "a,b\n1,2\n";
  EXPECT_THROW(read_signal_csv(bad_header), InputError);

  const std::string bad_number = temp_path("bad_number.csv");
  std::ofstream(bad_number) << "u,y\n1,2\nx,3\n";
  try {
    read_signal_csv(bad_number);
    FAIL() << "expected InputError";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }

  const std::string extra = temp_path("extra_column.csv");
  std::ofstream(extra) << "u,y\n1,2,3\n";
  EXPECT_THROW(read_signal_csv(extra), InputError);

  const std::string no_rows = temp_path("no_rows.csv");
  std::ofstream(no_rows) << "u,y\n";
  EXPECT_THROW(read_signal_csv(no_rows), InputError);
}

TEST(Dataset, WritesTraceRows) {
  std::vector<TraceRow> rows(2);
  rows[0] = {0.05, 1.0, 0.5, 1.5, 1.1};
  rows[1] = {0.10, 2.0, 1.5, 2.5, 1.9};
  const std::string path = temp_path("trace.csv");
  write_trace_csv(path, rows);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "t,mean,lower95,upper95,truth");
  int lines = 0;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) ++lines;
  }
  EXPECT_EQ(lines, 2);
}

SampleExperimentConfig small_sample_config() {
  SampleExperimentConfig cfg;
  cfg.repeats = 2;
  cfg.seed = 9;
  cfg.methods = {1, 2, 4, 7};
  cfg.train_small = 40;
  cfg.train_large = 80;
  cfg.init_subset = 20;
  cfg.sample_grid_spacing = 0.05;
  cfg.test_grid_spacing = 0.2;
  cfg.tune.subset_size = 40;
  cfg.tune.restarts = 1;
  cfg.tune.fixed_point_iters = 2;
  cfg.tune.max_opt_iters = 30;
  return cfg;
}

TEST(SampleExperiment, SmokeRunIsDeterministic) {
  const SampleExperimentConfig cfg = small_sample_config();
  const SampleExperimentReport a = run_sample_experiment(cfg);
  ASSERT_EQ(a.methods.size(), 4u);
  EXPECT_EQ(a.methods[0].label, "gp_true_hyp");
  EXPECT_EQ(a.methods[1].label, "gp_ml");
  EXPECT_EQ(a.methods[2].label, "sonig_small");
  EXPECT_EQ(a.methods[3].label, "fitc_large");
  for (const MethodSummary& m : a.methods) {
    EXPECT_TRUE(std::isfinite(m.mse));
    EXPECT_GT(m.mse, 0.0);
    EXPECT_GT(m.mean_variance, 0.0);
  }
  // Noise free inputs with the generating hyperparameters stay accurate even
  // on this tiny smoke configuration.
  EXPECT_LT(a.methods[0].mse, 0.05);

  const SampleExperimentReport b = run_sample_experiment(cfg);
  for (std::size_t i = 0; i < a.methods.size(); ++i) {
    EXPECT_EQ(a.methods[i].mse, b.methods[i].mse);
    EXPECT_EQ(a.methods[i].mean_variance, b.methods[i].mean_variance);
  }
}

TEST(SampleExperiment, ValidatesConfig) {
  SampleExperimentConfig cfg = small_sample_config();
  cfg.repeats = 0;
  EXPECT_THROW(run_sample_experiment(cfg), InputError);
  cfg = small_sample_config();
  cfg.methods = {8};
  EXPECT_THROW(run_sample_experiment(cfg), InputError);
  cfg = small_sample_config();
  cfg.train_small = 200;
  EXPECT_THROW(run_sample_experiment(cfg), InputError);
  cfg = small_sample_config();
  cfg.init_subset = cfg.train_large;
  EXPECT_THROW(run_sample_experiment(cfg), InputError);
}

TEST(NarxExperiment, SmokeRunLearnsSyntheticSignal) {
  const SignalData data = make_synthetic_narx_data(340, 3);
  NarxExperimentConfig cfg;
  cfg.narx.output_lags = 1;
  cfg.narx.input_lags = 3;
  cfg.train_count = 260;
  cfg.eval_count = 60;
  cfg.tune = true;
  cfg.tune_cfg.subset_size = 60;
  cfg.tune_cfg.restarts = 1;
  cfg.tune_cfg.fixed_point_iters = 1;
  cfg.tune_cfg.max_opt_iters = 30;
  cfg.tune_cfg.seed = 4;

  const NarxExperimentResult res = run_narx_experiment(data, cfg);
  EXPECT_TRUE(std::isfinite(res.free_run_rmse));
  EXPECT_TRUE(std::isfinite(res.one_step_rmse));
  EXPECT_GT(res.one_step_rmse, 0.0);
  EXPECT_GE(res.inducing_count, 1);
  EXPECT_GT(res.train_seconds, 0.0);
  ASSERT_EQ(res.trace.size(), 60u);
  EXPECT_GT(res.trace[0].upper95, res.trace[0].lower95);

  // The signal varies by roughly +-12; a fitted model has to beat that.
  EXPECT_LT(res.one_step_rmse, 6.0);
  EXPECT_LT(res.free_run_rmse, 12.0);
}

TEST(NarxExperiment, ValidatesSplit) {
  const SignalData data = make_synthetic_narx_data(100, 3);
  NarxExperimentConfig cfg;
  cfg.narx.output_lags = 1;
  cfg.narx.input_lags = 3;
  cfg.train_count = 80;
  cfg.eval_count = 60;
  EXPECT_THROW(run_narx_experiment(data, cfg), InputError);

  cfg.eval_count = 10;
  cfg.tune = false;
  cfg.hyp = Hyperparameters::isotropic(2, 1.0, 1.0, 0.01);
  EXPECT_THROW(run_narx_experiment(data, cfg), InputError);
}

}  // namespace
}  // namespace sonig
