#include <cmath>
#include <random>

#include <benchmark/benchmark.h>

#include <sonig/gp.hpp>
#include <sonig/moments.hpp>
#include <sonig/online.hpp>
#include <sonig/sonig.hpp>

namespace {

using namespace sonig;

Matrix grid_points(Eigen::Index n, double lo, double hi) {
  Matrix xu(1, n);
  xu.row(0) = Vector::LinSpaced(n, lo, hi).transpose();
  return xu;
}

// Full noisy input update at a fixed inducing set size; the dominant cost of
// streaming system identification.
void BM_SonigUpdate(benchmark::State& state) {
  const Eigen::Index n_u = state.range(0);
  Hyperparameters hyp = Hyperparameters::isotropic(1, 1.0, 1.0, 0.01);
  hyp.sigma_x_diag = Vector::Constant(1, 0.04);
  SonigModel model(grid_points(n_u, -4.0, 4.0), {hyp});

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> xs(-4.0, 4.0);
  std::normal_distribution<double> noise(0.0, 0.1);
  NoisyMeasurement meas;
  meas.sigma_x = Matrix::Constant(1, 1, 0.04);
  meas.sigma_f_diag = Vector::Constant(1, 0.01);
  for (auto _ : state) {
    const double x = xs(rng);
    meas.x_hat = Vector::Constant(1, x + noise(rng));
    meas.y_hat = Vector::Constant(1, std::sin(x) + noise(rng));
    benchmark::DoNotOptimize(sonig_update(model, meas));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_SonigUpdate)->Arg(10)->Arg(25)->Arg(50)->Arg(100);

// Plain rank one belief refinement without input noise.
void BM_OnlineUpdate(benchmark::State& state) {
  const Eigen::Index n_u = state.range(0);
  const Hyperparameters hyp = Hyperparameters::isotropic(1, 1.0, 1.0, 0.01);
  InducingSet ind(grid_points(n_u, -4.0, 4.0), hyp);

  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> xs(-4.0, 4.0);
  for (auto _ : state) {
    Vector x(1);
    x << xs(rng);
    online_update(ind, x, std::sin(x(0)), 0.01);
    benchmark::DoNotOptimize(ind.belief().mean.data());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_OnlineUpdate)->Arg(10)->Arg(25)->Arg(50)->Arg(100);

// Moment matched prediction at an uncertain test point.
void BM_StochasticPredict(benchmark::State& state) {
  const Eigen::Index n_u = state.range(0);
  Hyperparameters hyp = Hyperparameters::isotropic(1, 1.0, 1.0, 0.01);
  SonigModel model(grid_points(n_u, -4.0, 4.0), {hyp});
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> xs(-4.0, 4.0);
  for (int i = 0; i < 60; ++i) {
    Vector x(1);
    x << xs(rng);
    online_update(model.output(0), x, std::sin(x(0)), 0.01);
  }

  GaussianBelief at;
  at.mean = Vector::Constant(1, 0.0);
  at.cov = Matrix::Constant(1, 1, 0.09);
  for (auto _ : state) {
    at.mean(0) = xs(rng);
    benchmark::DoNotOptimize(stochastic_predict(model, at));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_StochasticPredict)->Arg(10)->Arg(25)->Arg(50)->Arg(100);

// Batch sparse regression over a full training set.
void BM_FitcBatch(benchmark::State& state) {
  const Eigen::Index n = state.range(0);
  const Hyperparameters hyp = Hyperparameters::isotropic(1, 1.0, 1.0, 0.01);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> xs(-4.0, 4.0);
  Matrix X(1, n);
  Vector y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    X(0, i) = xs(rng);
    y(i) = std::sin(X(0, i));
  }
  const Matrix xu = grid_points(25, -4.0, 4.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fitc_batch(X, y, xu, hyp));
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_FitcBatch)->Arg(200)->Arg(800)->Arg(2000);

}  // namespace

BENCHMARK_MAIN();
