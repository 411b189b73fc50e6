#include <sonig/online.hpp>

#include <algorithm>
#include <random>
#include <vector>

#include <gtest/gtest.h>
#include <sonig/errors.hpp>
#include <sonig/gp.hpp>

#include "support/fixtures.hpp"

namespace sonig {
namespace {

TEST(OnlinePredict, MatchesBatchPrediction) {
  std::mt19937_64 rng(31);
  const Hyperparameters hyp = Hyperparameters::isotropic(2, 1.3, 0.8, 0.04);
  const InducingSet ind = testing::random_state(hyp, 6, 20, -2.0, 2.0, rng);
  for (int t = 0; t < 10; ++t) {
    const Vector x = testing::random_vector(2, 2.0, rng);
    const PointPrediction p = online_predict_point(ind, x);
    const GaussianBelief batch = inducing_predict(ind, x);
    EXPECT_NEAR(p.mean, batch.mean(0), 1e-10);
    EXPECT_NEAR(p.variance, batch.cov(0, 0), 1e-10);
  }
}

// Processing measurements one at a time has to land on the batch FITC
// posterior over the same inducing points.
TEST(OnlineUpdate, SequentialMatchesBatch) {
  std::mt19937_64 rng(32);
  const Hyperparameters hyp = Hyperparameters::isotropic(1, 1.5, 1.1, 0.05);
  const Matrix X = testing::random_points(1, 40, -4.0, 4.0, rng);
  const Vector y = testing::random_vector(40, 1.2, rng);
  Matrix Xu(1, 7);
  Xu << -3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0;

  InducingSet online(Xu, hyp);
  for (int k = 0; k < X.cols(); ++k) {
    online_update(online, X.col(k), y(k), hyp.sigma_n_sq);
  }
  const InducingSet batch = fitc_batch(X, y, Xu, hyp);

  const double mean_scale = 1.0 + batch.belief().mean.norm();
  const double cov_scale = 1.0 + batch.belief().cov.norm();
  EXPECT_LT((online.belief().mean - batch.belief().mean).norm(), 1e-6 * mean_scale);
  EXPECT_LT((online.belief().cov - batch.belief().cov).norm(), 1e-6 * cov_scale);
}

TEST(OnlineUpdate, OrderDoesNotMatter) {
  std::mt19937_64 rng(33);
  const Hyperparameters hyp = Hyperparameters::isotropic(2, 1.0, 1.4, 0.09);
  const Matrix X = testing::random_points(2, 25, -2.5, 2.5, rng);
  const Vector y = testing::random_vector(25, 1.0, rng);
  const Matrix Xu = testing::random_points(2, 5, -2.5, 2.5, rng);

  std::vector<int> order(25);
  for (int i = 0; i < 25; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);

  InducingSet forward(Xu, hyp);
  InducingSet shuffled(Xu, hyp);
  for (int k = 0; k < 25; ++k) {
    online_update(forward, X.col(k), y(k), hyp.sigma_n_sq);
    online_update(shuffled, X.col(order[k]), y(order[k]), hyp.sigma_n_sq);
  }
  EXPECT_LT((forward.belief().mean - shuffled.belief().mean).norm(),
            1e-5 * (1.0 + forward.belief().mean.norm()));
  EXPECT_LT((forward.belief().cov - shuffled.belief().cov).norm(),
            1e-5 * (1.0 + forward.belief().cov.norm()));
}

TEST(OnlineUpdate, ShrinksVarianceAtMeasuredPoint) {
  const Hyperparameters hyp = Hyperparameters::isotropic(1, 1.0, 1.0, 0.01);
  Matrix Xu(1, 3);
  Xu << -1.0, 0.0, 1.0;
  InducingSet ind(Xu, hyp);
  Vector x(1);
  x << 0.2;
  const double before = online_predict_point(ind, x).variance;
  online_update(ind, x, 0.7, hyp.sigma_n_sq);
  const double after = online_predict_point(ind, x).variance;
  EXPECT_LT(after, before);
  EXPECT_GT(after, 0.0);
}

TEST(OnlineUpdate, InfiniteNoiseLeavesBeliefAlone) {
  const Hyperparameters hyp = Hyperparameters::isotropic(1, 1.0, 1.0, 0.01);
  Matrix Xu(1, 3);
  Xu << -1.0, 0.0, 1.0;
  InducingSet ind(Xu, hyp);
  Vector x(1);
  x << 0.4;
  online_update(ind, x, 5.0, hyp.sigma_n_sq);
  const GaussianBelief before = ind.belief();
  online_update(ind, x, -3.0, 1e12);
  EXPECT_LT((ind.belief().mean - before.mean).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_LT((ind.belief().cov - before.cov).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(OnlineUpdate, RejectsBadArguments) {
  const Hyperparameters hyp = Hyperparameters::isotropic(1, 1.0, 1.0, 0.01);
  Matrix Xu(1, 2);
  Xu << 0.0, 1.0;
  InducingSet ind(Xu, hyp);
  Vector x(1);
  x << 0.5;
  EXPECT_THROW(online_update(ind, x, 1.0, -0.1), InputError);
  EXPECT_THROW(online_update(ind, x, std::nan(""), 0.1), InputError);
  Vector wrong(2);
  wrong << 0.0, 0.0;
  EXPECT_THROW(online_update(ind, wrong, 1.0, 0.1), InputError);
}

}  // namespace
}  // namespace sonig
