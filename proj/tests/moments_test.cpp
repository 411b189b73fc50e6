#include <sonig/moments.hpp>

#include <random>

#include <gtest/gtest.h>
#include <sonig/errors.hpp>

#include "support/finite_diff.hpp"
#include "support/fixtures.hpp"
#include "support/quadrature.hpp"

namespace sonig {
namespace {

TEST(ExpectedKernelVector, ReducesToKernelAtPointMass) {
  std::mt19937_64 rng(61);
  const Hyperparameters hyp = Hyperparameters::isotropic(2, 1.4, 1.1, 0.02);
  const InducingSet ind = testing::random_state(hyp, 6, 10, -2.0, 2.0, rng);
  const Vector x = testing::random_points(2, 1, -2.0, 2.0, rng).col(0);
  const Vector expected = expected_kernel_vector(ind, GaussianBelief::dirac(x));
  const Vector plain = kernel_vector(ind.points(), x, hyp);
  EXPECT_LT((expected - plain).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(ExpectedKernelProduct, ReducesToProductAtPointMass) {
  std::mt19937_64 rng(62);
  Hyperparameters ha;
  ha.alpha_sq = 1.3;
  ha.lambda_diag.resize(2);
  ha.lambda_diag << 0.8, 1.5;
  Hyperparameters hb;
  hb.alpha_sq = 2.0;
  hb.lambda_diag.resize(2);
  hb.lambda_diag << 1.1, 0.6;

  const Matrix xu = testing::random_points(2, 5, -2.0, 2.0, rng);
  const InducingSet a(xu, ha);
  const InducingSet b(xu, hb);
  const Vector x = testing::random_points(2, 1, -2.0, 2.0, rng).col(0);

  const Matrix Q = expected_kernel_product(a, b, GaussianBelief::dirac(x));
  const Vector ka = kernel_vector(xu, x, ha);
  const Vector kb = kernel_vector(xu, x, hb);
  EXPECT_LT((Q - ka * kb.transpose()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(ExpectedKernelVector, MatchesQuadrature) {
  std::mt19937_64 rng(63);
  const Hyperparameters hyp = Hyperparameters::isotropic(2, 1.2, 0.9, 0.02);
  const InducingSet ind = testing::random_state(hyp, 5, 8, -2.0, 2.0, rng);

  GaussianBelief xstar;
  xstar.mean = testing::random_points(2, 1, -1.0, 1.0, rng).col(0);
  Matrix L(2, 2);
  L << 0.4, 0.0, 0.1, 0.3;
  xstar.cov = L * L.transpose();

  const Vector got = expected_kernel_vector(ind, xstar);
  for (Eigen::Index i = 0; i < ind.count(); ++i) {
    const Vector xi = ind.points().col(i);
    const double ref = testing::gauss_expectation(
        xstar.mean, xstar.cov, 30, [&](const Vector& x) { return se_kernel(xi, x, hyp); });
    EXPECT_LT(testing::rel_error(got(i), ref, 1e-10), 1e-6);
  }
}

TEST(ExpectedKernelProduct, MatchesQuadrature) {
  std::mt19937_64 rng(64);
  Hyperparameters ha;
  ha.alpha_sq = 1.3;
  ha.lambda_diag.resize(2);
  ha.lambda_diag << 0.8, 1.5;
  Hyperparameters hb;
  hb.alpha_sq = 2.0;
  hb.lambda_diag.resize(2);
  hb.lambda_diag << 1.1, 0.6;

  const Matrix xu = testing::random_points(2, 4, -2.0, 2.0, rng);
  const InducingSet a(xu, ha);
  const InducingSet b(xu, hb);

  GaussianBelief xstar;
  xstar.mean = testing::random_points(2, 1, -1.0, 1.0, rng).col(0);
  xstar.cov = Matrix::Identity(2, 2) * 0.09;
  xstar.cov(0, 1) = xstar.cov(1, 0) = 0.03;

  const Matrix cross = expected_kernel_product(a, b, xstar);
  const Matrix same = expected_kernel_product(a, a, xstar);
  for (Eigen::Index i = 0; i < xu.cols(); ++i) {
    for (Eigen::Index j = 0; j < xu.cols(); ++j) {
      const Vector xi = xu.col(i);
      const Vector xj = xu.col(j);
      const double ref_cross = testing::gauss_expectation(
          xstar.mean, xstar.cov, 30,
          [&](const Vector& x) { return se_kernel(xi, x, ha) * se_kernel(xj, x, hb); });
      EXPECT_LT(testing::rel_error(cross(i, j), ref_cross, 1e-10), 1e-6);
      const double ref_same = testing::gauss_expectation(
          xstar.mean, xstar.cov, 30,
          [&](const Vector& x) { return se_kernel(xi, x, ha) * se_kernel(xj, x, ha); });
      EXPECT_LT(testing::rel_error(same(i, j), ref_same, 1e-10), 1e-6);
    }
  }
}

TEST(StochasticPredict, ReducesToPlainPredictionAtPointMass) {
  std::mt19937_64 rng(65);
  Hyperparameters h0 = Hyperparameters::isotropic(2, 1.0, 1.0, 0.01);
  Hyperparameters h1 = Hyperparameters::isotropic(2, 1.8, 1.4, 0.02);
  const Matrix xu = testing::random_points(2, 6, -2.0, 2.0, rng);
  SonigModel model(xu, {h0, h1});
  for (int i = 0; i < 15; ++i) {
    const Vector x = testing::random_points(2, 1, -2.0, 2.0, rng).col(0);
    online_update(model.output(0), x, testing::random_vector(1, 1.0, rng)(0), 0.05);
    online_update(model.output(1), x, testing::random_vector(1, 1.0, rng)(0), 0.05);
  }

  const Vector x = testing::random_points(2, 1, -2.0, 2.0, rng).col(0);
  const GaussianBelief got = stochastic_predict(model, GaussianBelief::dirac(x));
  for (int k = 0; k < 2; ++k) {
    const GaussianBelief ref = inducing_predict(model.output(k), x);
    EXPECT_NEAR(got.mean(k), ref.mean(0), 1e-9);
    EXPECT_NEAR(got.cov(k, k), ref.cov(0, 0), 1e-9);
  }
  EXPECT_NEAR(got.cov(0, 1), 0.0, 1e-9);
}

TEST(StochasticPredict, FreshPriorKeepsPriorMoments) {
  const Hyperparameters hyp = Hyperparameters::isotropic(1, 2.5, 1.0, 0.01);
  Matrix xu(1, 4);
  xu << -3.0, -1.0, 1.0, 3.0;
  SonigModel model(xu, {hyp});
  GaussianBelief xstar;
  xstar.mean = Vector::Constant(1, 0.4);
  xstar.cov = Matrix::Constant(1, 1, 0.25);
  const GaussianBelief got = stochastic_predict(model, xstar);
  EXPECT_NEAR(got.mean(0), 0.0, 1e-9);
  EXPECT_NEAR(got.cov(0, 0), hyp.alpha_sq, 1e-6 * hyp.alpha_sq);
}

// The returned moments are the exact mixture moments of the pointwise
// prediction with the test input integrated out.
TEST(StochasticPredict, MatchesQuadratureMoments) {
  std::mt19937_64 rng(66);
  Hyperparameters h0 = Hyperparameters::isotropic(1, 1.0, 1.0, 0.01);
  Hyperparameters h1 = Hyperparameters::isotropic(1, 1.6, 2.2, 0.02);
  Matrix xu(1, 5);
  xu << -2.0, -1.0, 0.0, 1.0, 2.0;
  SonigModel model(xu, {h0, h1});
  std::uniform_real_distribution<double> xs(-2.0, 2.0);
  for (int i = 0; i < 20; ++i) {
    Vector x(1);
    x << xs(rng);
    online_update(model.output(0), x, std::sin(1.3 * x(0)), 0.02);
    online_update(model.output(1), x, std::cos(0.8 * x(0)), 0.02);
  }

  GaussianBelief xstar;
  xstar.mean = Vector::Constant(1, 0.3);
  xstar.cov = Matrix::Constant(1, 1, 0.04);
  const GaussianBelief got = stochastic_predict(model, xstar);

  const int order = 40;
  const auto mean_k = [&](int k, const Vector& x) {
    return inducing_predict(model.output(k), x).mean(0);
  };
  for (int k = 0; k < 2; ++k) {
    const double e_mean = testing::gauss_expectation(
        xstar.mean, xstar.cov, order, [&](const Vector& x) { return mean_k(k, x); });
    const double e_second = testing::gauss_expectation(
        xstar.mean, xstar.cov, order, [&](const Vector& x) {
          const GaussianBelief p = inducing_predict(model.output(k), x);
          return p.cov(0, 0) + p.mean(0) * p.mean(0);
        });
    EXPECT_LT(testing::rel_error(got.mean(k), e_mean, 1e-8), 1e-6);
    EXPECT_LT(testing::rel_error(got.cov(k, k), e_second - e_mean * e_mean, 1e-8), 1e-6);
  }
  const double e_prod = testing::gauss_expectation(
      xstar.mean, xstar.cov, order,
      [&](const Vector& x) { return mean_k(0, x) * mean_k(1, x); });
  const double e0 = testing::gauss_expectation(
      xstar.mean, xstar.cov, order, [&](const Vector& x) { return mean_k(0, x); });
  const double e1 = testing::gauss_expectation(
      xstar.mean, xstar.cov, order, [&](const Vector& x) { return mean_k(1, x); });
  EXPECT_LT(testing::rel_error(got.cov(0, 1), e_prod - e0 * e1, 1e-8), 1e-6);
}

TEST(StochasticPredict, CovarianceIsPositiveSemidefinite) {
  std::mt19937_64 rng(67);
  Hyperparameters hyp = Hyperparameters::isotropic(2, 1.0, 1.0, 0.01);
  const Matrix xu = testing::random_points(2, 6, -2.0, 2.0, rng);
  SonigModel model(xu, {hyp, hyp, hyp});
  for (int i = 0; i < 20; ++i) {
    const Vector x = testing::random_points(2, 1, -2.0, 2.0, rng).col(0);
    for (int k = 0; k < 3; ++k) {
      online_update(model.output(k), x, testing::random_vector(1, 1.0, rng)(0), 0.05);
    }
  }
  for (int t = 0; t < 10; ++t) {
    GaussianBelief xstar;
    xstar.mean = testing::random_points(2, 1, -2.5, 2.5, rng).col(0);
    xstar.cov = Matrix::Identity(2, 2) * 0.16;
    const GaussianBelief got = stochastic_predict(model, xstar);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(got.cov, Eigen::EigenvaluesOnly);
    EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-12);
    EXPECT_TRUE(got.mean.allFinite());
  }
}

TEST(Moments, ValidatesTestPoint) {
  const Hyperparameters hyp = Hyperparameters::isotropic(2, 1.0, 1.0, 0.01);
  Matrix xu(2, 2);
  xu << 0.0, 1.0, 0.0, 1.0;
  const InducingSet ind(xu, hyp);

  GaussianBelief bad;
  bad.mean = Vector::Zero(1);
  bad.cov = Matrix::Zero(1, 1);
  EXPECT_THROW(expected_kernel_vector(ind, bad), InputError);

  GaussianBelief asym;
  asym.mean = Vector::Zero(2);
  asym.cov.resize(2, 2);
  asym.cov << 0.1, 0.5, -0.5, 0.1;
  EXPECT_THROW(expected_kernel_vector(ind, asym), InputError);

  GaussianBelief indefinite;
  indefinite.mean = Vector::Zero(2);
  indefinite.cov = -Matrix::Identity(2, 2);
  EXPECT_THROW(expected_kernel_vector(ind, indefinite), InputError);
}

}  // namespace
}  // namespace sonig
