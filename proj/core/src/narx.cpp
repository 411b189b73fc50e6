#include "sonig/narx.hpp"

#include "sonig/errors.hpp"

namespace sonig {

void NarxConfig::validate() const {
  if (output_lags < 0) throw InputError("NarxConfig: output_lags must be nonnegative");
  if (input_lags < 1) throw InputError("NarxConfig: input_lags must be at least one");
  if (output_dim < 1 || input_dim < 1) throw InputError("NarxConfig: signal dimensions must be positive");
  if (!(inducing_threshold > 0.0)) throw InputError("NarxConfig: inducing_threshold must be positive");
}

NarxState::NarxState(const NarxConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  const int n = cfg_.regressor_size();
  window_.mean = Vector::Zero(n);
  window_.cov = Matrix::Zero(n, n);
}

bool NarxState::warm() const {
  return filled_outputs_ >= cfg_.output_lags && filled_inputs_ >= cfg_.input_lags;
}

namespace {

// Rebuilds a window belief with `fresh` inserted at position `at` and the
// retained old coordinates listed in `keep` placed right after it.
GaussianBelief shifted(const GaussianBelief& old, const std::vector<Eigen::Index>& keep_before,
                       const GaussianBelief& fresh, const Matrix& fresh_cross,
                       const std::vector<Eigen::Index>& keep_after) {
  const Eigen::Index nb = static_cast<Eigen::Index>(keep_before.size());
  const Eigen::Index nf = fresh.size();
  const Eigen::Index na = static_cast<Eigen::Index>(keep_after.size());
  std::vector<Eigen::Index> keep = keep_before;
  keep.insert(keep.end(), keep_after.begin(), keep_after.end());

  GaussianBelief out;
  out.mean.resize(nb + nf + na);
  out.cov.resize(nb + nf + na, nb + nf + na);

  const GaussianBelief kept = old.marginal(keep);
  out.mean.head(nb) = kept.mean.head(nb);
  out.mean.segment(nb, nf) = fresh.mean;
  out.mean.tail(na) = kept.mean.tail(na);

  out.cov.topLeftCorner(nb, nb) = kept.cov.topLeftCorner(nb, nb);
  out.cov.bottomRightCorner(na, na) = kept.cov.bottomRightCorner(na, na);
  out.cov.block(0, nb + nf, nb, na) = kept.cov.topRightCorner(nb, na);
  out.cov.block(nb + nf, 0, na, nb) = kept.cov.bottomLeftCorner(na, nb);
  out.cov.block(nb, nb, nf, nf) = fresh.cov;
  // fresh_cross holds Cov[fresh, old window]; select the retained columns.
  for (Eigen::Index j = 0; j < nb; ++j) {
    out.cov.block(nb, j, nf, 1) = fresh_cross.col(keep_before[static_cast<std::size_t>(j)]);
    out.cov.block(j, nb, 1, nf) =
        fresh_cross.col(keep_before[static_cast<std::size_t>(j)]).transpose();
  }
  for (Eigen::Index j = 0; j < na; ++j) {
    out.cov.block(nb, nb + nf + j, nf, 1) =
        fresh_cross.col(keep_after[static_cast<std::size_t>(j)]);
    out.cov.block(nb + nf + j, nb, 1, nf) =
        fresh_cross.col(keep_after[static_cast<std::size_t>(j)]).transpose();
  }
  return out;
}

}  // namespace

void NarxState::push_input(const Vector& u_mean, const Matrix& u_cov) {
  if (u_mean.size() != cfg_.input_dim) throw InputError("NarxState: input dimension mismatch");
  const Eigen::Index yb = cfg_.output_lags * cfg_.output_dim;
  const Eigen::Index du = cfg_.input_dim;
  const Eigen::Index ub = cfg_.input_lags * du;

  std::vector<Eigen::Index> keep_before;  // output block stays in front
  for (Eigen::Index i = 0; i < yb; ++i) keep_before.push_back(i);
  std::vector<Eigen::Index> keep_after;   // input block minus the oldest entry
  for (Eigen::Index i = yb; i < yb + ub - du; ++i) keep_after.push_back(i);

  // The fresh measurement is uncorrelated with the current window.
  const Matrix cross = Matrix::Zero(du, yb + ub);
  GaussianBelief fresh(u_mean, u_cov);

  // shifted() lays out [kept_before, fresh, kept_after]; the input block needs
  // [outputs, fresh, older inputs], which is exactly that ordering.
  window_ = shifted(window_, keep_before, fresh, cross, keep_after);
  filled_inputs_ = std::min(filled_inputs_ + 1, cfg_.input_lags);
}

void NarxState::push_output(const Vector& y_mean, const Matrix& y_cov, const Matrix& cross) {
  if (y_mean.size() != cfg_.output_dim) throw InputError("NarxState: output dimension mismatch");
  const Eigen::Index yb = cfg_.output_lags * cfg_.output_dim;
  const Eigen::Index dy = cfg_.output_dim;
  const Eigen::Index ub = cfg_.input_lags * cfg_.input_dim;
  if (cfg_.output_lags == 0) return;  // outputs do not enter the regressor
  if (cross.rows() != dy || cross.cols() != yb + ub) {
    throw InputError("NarxState: output cross covariance shape mismatch");
  }

  std::vector<Eigen::Index> keep_before;  // nothing ahead of the newest output
  std::vector<Eigen::Index> keep_after;   // younger outputs, then all inputs
  for (Eigen::Index i = 0; i < yb - dy; ++i) keep_after.push_back(i);
  for (Eigen::Index i = yb; i < yb + ub; ++i) keep_after.push_back(i);

  GaussianBelief fresh(y_mean, y_cov);
  window_ = shifted(window_, keep_before, fresh, cross, keep_after);
  filled_outputs_ = std::min(filled_outputs_ + 1, cfg_.output_lags);
}

void NarxState::set_window(GaussianBelief b) {
  if (b.size() != cfg_.regressor_size()) throw InputError("NarxState: window size mismatch");
  window_ = std::move(b);
  window_.symmetrize();
}

SysidStepResult sysid_step(SonigModel& model, NarxState& state, const Vector& u,
                           const Vector& y_next, const NarxConfig& cfg) {
  cfg.validate();
  if (cfg.regressor_size() != model.input_dim()) {
    throw InputError("sysid_step: regressor size does not match the model input dimension");
  }
  if (cfg.output_dim != model.output_dim()) {
    throw InputError("sysid_step: output dimension does not match the model");
  }
  const Eigen::Index yb = cfg.output_lags * cfg.output_dim;

  // Input noise for the newest input block, from the shared input noise
  // covariance of the model.
  const Matrix sigma_x = model.sigma_x();
  const Matrix u_cov = sigma_x.block(yb, yb, cfg.input_dim, cfg.input_dim);
  state.push_input(u, u_cov);

  Vector sigma_f(cfg.output_dim);
  for (int i = 0; i < cfg.output_dim; ++i) sigma_f(i) = model.output(i).hyp().sigma_n_sq;

  SysidStepResult result;
  if (!state.warm()) {
    // Still filling the lag window: store the measurement as is.
    state.push_output(y_next, Matrix(sigma_f.asDiagonal()),
                      Matrix::Zero(cfg.output_dim, cfg.regressor_size()));
    return result;
  }

  NoisyMeasurement meas;
  meas.x_hat = state.window().mean;
  meas.sigma_x = state.window().cov;
  meas.y_hat = y_next;
  meas.sigma_f_diag = sigma_f;

  result.input_post = input_posterior(model.outputs(), meas, cfg.sonig);
  if (cfg.posterior_writeback) {
    state.set_window(result.input_post);
  }

  if (model.nearest_normalized_distance(result.input_post.mean) > cfg.inducing_threshold) {
    model.add_inducing_point(result.input_post.mean);
    result.added_inducing = true;
  }

  std::vector<UpdateDerivatives> derivs;
  derivs.reserve(static_cast<std::size_t>(cfg.output_dim));
  for (int i = 0; i < cfg.output_dim; ++i) {
    derivs.push_back(update_derivatives(model.output(i), result.input_post.mean, y_next(i),
                                        sigma_f(i)));
  }
  OutputPosterior post = output_posterior(derivs, meas, result.input_post);
  for (int i = 0; i < cfg.output_dim; ++i) {
    if (apply_taylor_update(model.output(i), derivs[static_cast<std::size_t>(i)],
                            result.input_post, cfg.sonig) != 0.0) {
      ++model.psd_repairs;
    }
  }

  // Cross covariance against the window as it currently stands.
  const Matrix cross = post.slopes * state.window().cov;
  state.push_output(post.f_plus.mean, post.f_plus.cov, cross);

  result.updated = true;
  result.output_post = std::move(post.f_plus);
  return result;
}

std::vector<GaussianBelief> free_run_simulate(const SonigModel& model, NarxState state,
                                              const Matrix& inputs, const NarxConfig& cfg) {
  cfg.validate();
  if (inputs.rows() != cfg.input_dim) throw InputError("free_run_simulate: input dimension mismatch");
  if (cfg.regressor_size() != model.input_dim()) {
    throw InputError("free_run_simulate: regressor size does not match the model");
  }
  if (!state.warm()) throw InputError("free_run_simulate: state must be warm");

  const int dy = model.output_dim();
  std::vector<GaussianBelief> predictions;
  predictions.reserve(static_cast<std::size_t>(inputs.cols()));

  for (Eigen::Index t = 0; t < inputs.cols(); ++t) {
    state.push_input(inputs.col(t), Matrix::Zero(cfg.input_dim, cfg.input_dim));
    const GaussianBelief& x = state.window();

    GaussianBelief pred;
    Matrix slopes(dy, x.size());
    if (cfg.propagate_uncertainty) {
      pred = stochastic_predict(model, x);
    } else {
      pred.mean.resize(dy);
      pred.cov = Matrix::Zero(dy, dy);
    }
    for (int i = 0; i < dy; ++i) {
      const InducingSet& ind = model.output(i);
      const Vector b = ind.solve_kuu(ind.belief().mean);
      slopes.row(i) = b.transpose() * kernel_grad(ind.points(), x.mean, ind.hyp());
      if (!cfg.propagate_uncertainty) {
        const GaussianBelief point = inducing_predict(ind, x.mean);
        pred.mean(i) = point.mean(0);
        pred.cov(i, i) = std::max(point.cov(0, 0), 0.0);
      }
    }
    if (!pred.cov.allFinite() || !pred.mean.allFinite()) {
      throw NumericalError("free_run_simulate: prediction lost finiteness");
    }

    const Matrix cross = cfg.propagate_uncertainty ? Matrix(slopes * x.cov)
                                                   : Matrix::Zero(dy, x.size());
    state.push_output(pred.mean, pred.cov, cross);
    predictions.push_back(std::move(pred));
  }
  return predictions;
}

}  // namespace sonig
