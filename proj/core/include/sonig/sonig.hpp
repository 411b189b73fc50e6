#pragma once

#include <vector>

#include "sonig/online.hpp"

namespace sonig {

// One training sample with uncertain input and uncertain outputs.
// x_hat is the measured input with noise covariance sigma_x (d_x x d_x,
// typically diagonal); y_hat the measured outputs with independent noise
// variances sigma_f_diag per output.
struct NoisyMeasurement {
  Vector x_hat;
  Matrix sigma_x;
  Vector y_hat;
  Vector sigma_f_diag;

  void validate(int input_dim, int output_dim) const;
};

struct SonigOptions {
  int max_relin_iters{3};
  double relin_tol{1e-6};
  // Disables the 0.5 * trace(d2mu * Sigma_x) correction on posterior means
  // when false; the covariance correction terms are kept either way.
  bool second_order_mean{true};
  // Eigenvalue floor for covariance repair, relative to alpha_sq.
  double psd_tol{1e-6};
  // Repair also triggers when the belief covariance exceeds the prior by this
  // factor in the whitened metric L^{-1} Sigma L^{-T}; the Taylor trace terms
  // can otherwise pump energy into directions the data never corrects.
  double prior_var_tol{4.0};
  // Measurements whose innovation exceeds this many predicted standard
  // deviations get their noise inflated until they sit at the limit; the
  // update expansion is only locally valid and an implausible innovation
  // against a tiny predicted variance makes its coefficients blow up.
  // Nonpositive disables the gate.
  double innovation_gate{10.0};
};

// Derivatives of the rank one posterior update with respect to the input
// location, evaluated at one point for one output. Layout conventions:
// d-indexed lists hold one entry per input dimension, d^2-indexed lists hold
// entry j*d + k for the mixed partial against (x_j, x_k).
struct UpdateDerivatives {
  // Innovation chain at the evaluation point.
  double q{0.0};           // y - mu_plus
  RowVector dq;            // 1 x d
  Matrix d2q;              // d x d
  double p{0.0};           // Sigma_++ + sigma_f
  RowVector dp;
  Matrix d2p;
  RowVector dp_inv;
  Matrix d2p_inv;
  double sigma_f{0.0};

  // Posterior over the inducing point values after assimilating the sample at
  // this exact input, and its input derivatives.
  Vector mu_u_new;                 // n_u
  Matrix dmu_u;                    // n_u x d
  Matrix d2mu_u;                   // n_u x d^2
  Matrix sigma_uu_new;             // n_u x n_u
  std::vector<Matrix> dsigma_uu;   // d entries, each n_u x n_u
  std::vector<Matrix> d2sigma_uu;  // d^2 entries, each n_u x n_u

  // Slope of the prior predictive mean at the evaluation point, 1 x d.
  RowVector dmu_plus;
};

// Posterior over the true input location of one sample (linearized; the
// expansion point is refreshed up to opts.max_relin_iters times).
GaussianBelief input_posterior(const std::vector<InducingSet>& outputs,
                               const NoisyMeasurement& meas, const SonigOptions& opts);

// Derivative bundle for one output at evaluation point x with measurement
// noise sigma_f on that output. Pure: the belief in `ind` is not modified.
UpdateDerivatives update_derivatives(const InducingSet& ind, const Vector& x, double y,
                                     double sigma_f);

// Posterior belief over the measured outputs themselves, plus the cross
// covariance Cov[f_+, x_+] (d_y x d_x), accounting for the remaining input
// uncertainty input_post.cov through the derivative bundles.
struct OutputPosterior {
  GaussianBelief f_plus;
  Matrix cross_cov;
  Matrix slopes;  // d mu_+^{new} / d x per output, d_y x d_x
};

OutputPosterior output_posterior(const std::vector<UpdateDerivatives>& derivs,
                                 const NoisyMeasurement& meas,
                                 const GaussianBelief& input_post);

// Applies the Taylor corrected update for one output in place.
// Returns the offending eigenvalue when covariance repair triggered (negative
// for a floor breach, the whitened maximum for a prior bound breach), or 0
// when the covariance needed no repair.
double apply_taylor_update(InducingSet& ind, const UpdateDerivatives& derivs,
                           const GaussianBelief& input_post, const SonigOptions& opts);

// Multi output model: one InducingSet per output dimension, sharing the same
// inducing inputs and the same input noise covariance.
class SonigModel {
 public:
  SonigModel(const Matrix& xu, std::vector<Hyperparameters> hyp);

  int output_dim() const { return static_cast<int>(outputs_.size()); }
  int input_dim() const { return outputs_.front().dim(); }
  Eigen::Index inducing_count() const { return outputs_.front().count(); }
  const Matrix& inducing_points() const { return outputs_.front().points(); }

  const InducingSet& output(int i) const { return outputs_.at(static_cast<std::size_t>(i)); }
  InducingSet& output(int i) { return outputs_.at(static_cast<std::size_t>(i)); }
  const std::vector<InducingSet>& outputs() const { return outputs_; }
  std::vector<InducingSet>& outputs() { return outputs_; }

  Matrix sigma_x() const { return outputs_.front().hyp().sigma_x(); }

  // min over outputs of the normalized squared distance to the nearest
  // inducing input.
  double nearest_normalized_distance(const Vector& x) const;

  void add_inducing_point(const Vector& x);

  // Count of covariance repairs performed across updates, for diagnostics.
  long psd_repairs{0};
  // Count of measurements whose noise was inflated by the innovation gate.
  long gated_updates{0};

 private:
  std::vector<InducingSet> outputs_;
};

struct SonigUpdateResult {
  GaussianBelief input_post;
  OutputPosterior output_post;
  // Size of the second order mean correction relative to the first order
  // mean shift, max over outputs. Large values flag a too coarse model.
  double correction_ratio{0.0};
};

// Full measurement update: input posterior, derivative bundles per output,
// Taylor corrected belief updates, output posterior.
SonigUpdateResult sonig_update(SonigModel& model, const NoisyMeasurement& meas,
                               const SonigOptions& opts = {});

}  // namespace sonig
