#pragma once

#include <Eigen/Cholesky>

#include "sonig/kernels.hpp"

namespace sonig {

// Relative jitter added to prior kernel matrix diagonals before factorization.
inline constexpr double kJitterScale = 1e-10;

// Exact GP posterior over the latent function at Xstar (columns are points),
// given training pairs (X, y) and a zero prior mean. Predictive covariance is
// over the noise free latent values.
GaussianBelief exact_gp_posterior(const Matrix& X, const Vector& y, const Matrix& Xstar,
                                  const Hyperparameters& hyp);

// As above with per point noise variances instead of the shared sigma_n_sq.
GaussianBelief exact_gp_posterior(const Matrix& X, const Vector& y, const Matrix& Xstar,
                                  const Hyperparameters& hyp, const Vector& noise_diag);

// Inducing point set with the Gaussian belief held over the function values
// at those points. Owns the kernel matrix of the points and its Cholesky
// factor; the factor is rebuilt whenever points are added or removed.
class InducingSet {
 public:
  InducingSet(Matrix xu, Hyperparameters hyp);

  Eigen::Index count() const { return xu_.cols(); }
  int dim() const { return static_cast<int>(xu_.rows()); }
  const Matrix& points() const { return xu_; }
  const Hyperparameters& hyp() const { return hyp_; }
  const Matrix& kuu() const { return kuu_; }
  const GaussianBelief& belief() const { return belief_; }
  GaussianBelief& belief() { return belief_; }

  void set_belief(GaussianBelief b);

  // Solves (Kuu + jitter I) Z = rhs.
  Vector solve_kuu(const Vector& rhs) const { return llt_.solve(rhs); }
  Matrix solve_kuu(const Matrix& rhs) const { return llt_.solve(rhs); }

  // Cholesky factor of (Kuu + jitter I), for whitened-form solves.
  const Eigen::LLT<Matrix>& chol_kuu() const { return llt_; }

  // Appends columns of xu_new, extending the belief without changing the
  // posterior over the existing points. New points must be distinct from
  // the current ones.
  void add_points(const Matrix& xu_new);

  // Drops one inducing point; the belief over the rest is the marginal.
  void remove_point(Eigen::Index index);

  // min_i (x - xu_i)^T Lambda^{-1} (x - xu_i)
  double nearest_normalized_distance(const Vector& x) const;

 private:
  void factorize();

  Matrix xu_;
  Hyperparameters hyp_;
  Matrix kuu_;
  Eigen::LLT<Matrix> llt_;
  GaussianBelief belief_;
};

// Per point FITC training quantities: lambda_n(i) = k(x_i,x_i) - Q_ii and the
// regularized information matrix delta = Kuu + Kuf (Lambda_n + Sigma_n)^{-1} Kfu.
struct FitcWorkspace {
  Vector lambda_n;
  Matrix delta;
};

FitcWorkspace fitc_workspace(const Matrix& X, const InducingSet& ind, const Vector& noise_diag);

// Batch sparse regression: posterior belief over the function values at Xu
// from all training pairs at once. Measurement noise is hyp.sigma_n_sq per point.
InducingSet fitc_batch(const Matrix& X, const Vector& y, const Matrix& Xu,
                       const Hyperparameters& hyp);

// Posterior over latent function values at Xstar implied by the belief held
// over the inducing points.
GaussianBelief inducing_predict(const InducingSet& ind, const Matrix& Xstar);

}  // namespace sonig
