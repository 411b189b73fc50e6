#pragma once

#include <cstdint>

#include "sonig/gp.hpp"

namespace sonig {

struct TuneConfig {
  int subset_size{200};
  int restarts{2};
  // Rounds of alternating between optimizing the marginal likelihood and
  // refreshing the posterior mean slopes that enter the noise term.
  int fixed_point_iters{3};
  int max_opt_iters{80};
  double grad_tol{1e-5};
  std::uint64_t seed{0};
  // When false the input noise variances are pinned at zero and excluded
  // from the search (plain maximum likelihood regression).
  bool tune_sigma_x{true};
};

// Per point noise variances sigma_n_sq + s_i^T Sigma_x s_i, with s_i the
// posterior mean slope at training point i (columns of `slopes`).
Vector slope_noise(const Matrix& slopes, const Hyperparameters& hyp);

// Negative log marginal likelihood with the slope corrected noise matrix.
// `slopes` is d x n (zero columns recover the standard objective).
double nigp_neg_log_marginal(const Hyperparameters& hyp, const Matrix& X, const Vector& y,
                             const Matrix& slopes);

// Slopes of the posterior mean at the training inputs, d x n. The noise used
// for the fit is slope corrected with `slopes_for_noise`.
Matrix posterior_mean_slopes(const Matrix& X, const Vector& y, const Hyperparameters& hyp,
                             const Matrix& slopes_for_noise);

// Subset of data tuning: picks a random subset, then alternates quasi-Newton
// likelihood optimization with slope refreshes. When round_objectives is
// given it receives the final objective value of every round.
Hyperparameters tune_sod(const Matrix& X, const Vector& y, const TuneConfig& cfg,
                         std::vector<double>* round_objectives = nullptr);

// Exact GP prediction with the slope corrected noise matrix (one slope pass).
// With sigma_x_diag zero this equals exact_gp_posterior.
GaussianBelief nigp_predict(const Matrix& X, const Vector& y, const Hyperparameters& hyp,
                            const Matrix& Xstar);

}  // namespace sonig
