#include "sonig/sonig.hpp"

#include <cmath>

#include "sonig/errors.hpp"

namespace sonig {

void NoisyMeasurement::validate(int input_dim, int output_dim) const {
  if (x_hat.size() != input_dim) throw InputError("NoisyMeasurement: x_hat dimension mismatch");
  if (sigma_x.rows() != input_dim || sigma_x.cols() != input_dim) {
    throw InputError("NoisyMeasurement: sigma_x shape mismatch");
  }
  if (y_hat.size() != output_dim) throw InputError("NoisyMeasurement: y_hat dimension mismatch");
  if (sigma_f_diag.size() != output_dim) {
    throw InputError("NoisyMeasurement: sigma_f_diag dimension mismatch");
  }
  if (!x_hat.allFinite() || !y_hat.allFinite() || !sigma_x.allFinite()) {
    throw InputError("NoisyMeasurement: entries must be finite");
  }
  for (Eigen::Index i = 0; i < sigma_f_diag.size(); ++i) {
    if (!(sigma_f_diag(i) >= 0.0) || !std::isfinite(sigma_f_diag(i))) {
      throw InputError("NoisyMeasurement: sigma_f_diag entries must be nonnegative");
    }
  }
  const double scale = 1.0 + sigma_x.cwiseAbs().maxCoeff();
  if ((sigma_x - sigma_x.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw InputError("NoisyMeasurement: sigma_x must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sigma_x, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-10 * scale) {
    throw InputError("NoisyMeasurement: sigma_x must be positive semidefinite");
  }
}

namespace {

struct LinearizedOutput {
  double mean;
  double variance;
  RowVector slope;  // d mu_+ / d x
};

LinearizedOutput linearize_output(const InducingSet& ind, const Vector& x) {
  LinearizedOutput out;
  const Vector k = kernel_vector(ind.points(), x, ind.hyp());
  const Vector a = ind.solve_kuu(k);
  const Vector b = ind.solve_kuu(ind.belief().mean);
  const Vector c = ind.belief().cov * a;
  out.mean = k.dot(b);
  out.variance = ind.hyp().alpha_sq - k.dot(a) + a.dot(c);
  const Matrix G = kernel_grad(ind.points(), x, ind.hyp());
  out.slope = b.transpose() * G;
  return out;
}

}  // namespace

GaussianBelief input_posterior(const std::vector<InducingSet>& outputs,
                               const NoisyMeasurement& meas, const SonigOptions& opts) {
  const int dy = static_cast<int>(outputs.size());
  const int dx = outputs.front().dim();
  meas.validate(dx, dy);

  if (meas.sigma_x.cwiseAbs().maxCoeff() == 0.0) {
    return GaussianBelief::dirac(meas.x_hat);
  }

  GaussianBelief post = GaussianBelief::dirac(meas.x_hat);
  Vector xbar = meas.x_hat;
  const int iters = std::max(1, opts.max_relin_iters);
  for (int it = 0; it < iters; ++it) {
    Matrix D(dy, dx);
    Vector m(dy);
    Vector s(dy);
    for (int i = 0; i < dy; ++i) {
      const LinearizedOutput lin = linearize_output(outputs[static_cast<std::size_t>(i)], xbar);
      D.row(i) = lin.slope;
      m(i) = lin.mean;
      s(i) = lin.variance + meas.sigma_f_diag(i);
    }
    const Vector r = meas.y_hat - m + D * (xbar - meas.x_hat);
    Matrix M = D * meas.sigma_x * D.transpose();
    M.diagonal() += s;
    Eigen::LDLT<Matrix> ldlt(M);
    if (ldlt.info() != Eigen::Success || ldlt.vectorD().minCoeff() <= 0.0) {
      throw NumericalError("input_posterior: innovation covariance not positive definite");
    }
    const Matrix gain = meas.sigma_x * D.transpose() * ldlt.solve(Matrix::Identity(dy, dy));
    post.mean = meas.x_hat + gain * r;
    post.cov = meas.sigma_x - gain * D * meas.sigma_x;
    post.symmetrize();

    const Vector shift = post.mean - xbar;
    double metric = 0.0;
    for (const InducingSet& ind : outputs) {
      metric = std::max(metric, shift.cwiseQuotient(ind.hyp().lambda_diag).dot(shift));
    }
    if (metric < opts.relin_tol) break;
    xbar = post.mean;
  }
  return post;
}

UpdateDerivatives update_derivatives(const InducingSet& ind, const Vector& x, double y,
                                     double sigma_f) {
  if (x.size() != ind.dim()) throw InputError("update_derivatives: point dimension mismatch");
  if (!(sigma_f >= 0.0) || !std::isfinite(sigma_f)) {
    throw InputError("update_derivatives: sigma_f must be nonnegative");
  }
  const Eigen::Index nu = ind.count();
  const Eigen::Index d = x.size();

  const Vector k = kernel_vector(ind.points(), x, ind.hyp());
  const Matrix G = kernel_grad(ind.points(), x, ind.hyp());      // nu x d
  const Matrix H = kernel_hess_rows(ind.points(), x, ind.hyp()); // nu x d^2

  const Matrix& suu = ind.belief().cov;
  const Vector a = ind.solve_kuu(k);
  const Vector b = ind.solve_kuu(ind.belief().mean);
  const Vector c = suu * a;
  const Matrix AG = ind.solve_kuu(G);
  const Matrix g = suu * AG;                                     // nu x d
  const Matrix h = suu * ind.solve_kuu(H);                       // nu x d^2
  const Vector w = a - ind.solve_kuu(c);
  const Matrix WG = AG - ind.solve_kuu(Matrix(g));

  UpdateDerivatives out;
  out.sigma_f = sigma_f;
  const double mu_plus = k.dot(b);
  out.q = y - mu_plus;
  out.dq = -(b.transpose() * G);
  out.d2q = -Eigen::Map<const Matrix>((H.transpose() * b).eval().data(), d, d);
  const double sigma_pp = ind.hyp().alpha_sq - k.dot(a) + a.dot(c);
  out.p = sigma_pp + sigma_f;
  if (!(out.p > 0.0)) throw NumericalError("update_derivatives: nonpositive innovation variance");
  out.dp = -2.0 * (w.transpose() * G);
  out.d2p.resize(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index l = j; l < d; ++l) {
      const double v = -2.0 * G.col(l).dot(WG.col(j)) - 2.0 * w.dot(H.col(j * d + l));
      out.d2p(j, l) = v;
      out.d2p(l, j) = v;
    }
  }
  const double pinv = 1.0 / out.p;
  const double pinv2 = pinv * pinv;
  out.dp_inv = -pinv2 * out.dp;
  out.d2p_inv = 2.0 * pinv2 * pinv * (out.dp.transpose() * out.dp) - pinv2 * out.d2p;

  out.mu_u_new = ind.belief().mean + c * (out.q * pinv);
  out.dmu_u.resize(nu, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    out.dmu_u.col(j) = g.col(j) * (out.q * pinv) + c * (out.dp_inv(j) * out.q + pinv * out.dq(j));
  }
  out.d2mu_u.resize(nu, d * d);
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index l = j; l < d; ++l) {
      const Vector col =
          h.col(j * d + l) * (out.q * pinv) +
          g.col(j) * (out.dp_inv(l) * out.q + pinv * out.dq(l)) +
          g.col(l) * (out.dp_inv(j) * out.q + pinv * out.dq(j)) +
          c * (out.d2p_inv(j, l) * out.q + out.dp_inv(j) * out.dq(l) +
               out.dp_inv(l) * out.dq(j) + pinv * out.d2q(j, l));
      out.d2mu_u.col(j * d + l) = col;
      out.d2mu_u.col(l * d + j) = col;
    }
  }

  out.sigma_uu_new = suu - (c * c.transpose()) * pinv;
  out.dsigma_uu.resize(static_cast<std::size_t>(d));
  for (Eigen::Index j = 0; j < d; ++j) {
    Matrix m = g.col(j) * (pinv * c.transpose()) + c * (out.dp_inv(j) * c.transpose()) +
               c * (pinv * g.col(j).transpose());
    m = -m;
    out.dsigma_uu[static_cast<std::size_t>(j)] = std::move(m);
  }
  out.d2sigma_uu.resize(static_cast<std::size_t>(d * d));
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index l = j; l < d; ++l) {
      Matrix m = h.col(j * d + l) * (pinv * c.transpose()) +
                 g.col(j) * (out.dp_inv(l) * c.transpose()) +
                 g.col(j) * (pinv * g.col(l).transpose()) +
                 g.col(l) * (out.dp_inv(j) * c.transpose()) +
                 c * (out.d2p_inv(j, l) * c.transpose()) +
                 c * (out.dp_inv(j) * g.col(l).transpose()) +
                 g.col(l) * (pinv * g.col(j).transpose()) +
                 c * (out.dp_inv(l) * g.col(j).transpose()) +
                 c * (pinv * h.col(j * d + l).transpose());
      m = -m;
      out.d2sigma_uu[static_cast<std::size_t>(j * d + l)] = m;
      if (l != j) out.d2sigma_uu[static_cast<std::size_t>(l * d + j)] = std::move(m);
    }
  }

  out.dmu_plus = b.transpose() * G;
  return out;
}

OutputPosterior output_posterior(const std::vector<UpdateDerivatives>& derivs,
                                 const NoisyMeasurement& meas,
                                 const GaussianBelief& input_post) {
  const int dy = static_cast<int>(derivs.size());
  const Eigen::Index dx = input_post.size();
  const Matrix& S = input_post.cov;

  OutputPosterior out;
  out.f_plus.mean.resize(dy);
  out.f_plus.cov.resize(dy, dy);
  out.cross_cov.resize(dy, dx);

  Matrix slopes(dy, dx);
  for (int i = 0; i < dy; ++i) {
    const UpdateDerivatives& dv = derivs[static_cast<std::size_t>(i)];
    const double sf = dv.sigma_f;
    const double pinv = 1.0 / dv.p;

    const double mu0 = meas.y_hat(i) - sf * dv.q * pinv;
    const RowVector dmu = -sf * (dv.dp_inv * dv.q + pinv * dv.dq);
    const Matrix d2mu = -sf * (dv.d2p_inv * dv.q + dv.dp_inv.transpose() * dv.dq +
                               dv.dq.transpose() * dv.dp_inv + pinv * dv.d2q);
    const double var0 = sf - sf * sf * pinv;
    const Matrix d2var = -sf * sf * dv.d2p_inv;

    out.f_plus.mean(i) = mu0 + 0.5 * (d2mu.cwiseProduct(S)).sum();
    out.f_plus.cov(i, i) =
        var0 + dmu * S * dmu.transpose() + 0.5 * (d2var.cwiseProduct(S)).sum();
    slopes.row(i) = dmu;
  }
  for (int i = 0; i < dy; ++i) {
    for (int j = i + 1; j < dy; ++j) {
      const double v = slopes.row(i) * S * slopes.row(j).transpose();
      out.f_plus.cov(i, j) = v;
      out.f_plus.cov(j, i) = v;
    }
  }
  out.cross_cov = slopes * S;
  out.slopes = std::move(slopes);

  Eigen::SelfAdjointEigenSolver<Matrix> eig(out.f_plus.cov, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < 0.0) {
    out.f_plus.clip_eigenvalues(0.0);
  }
  return out;
}

double apply_taylor_update(InducingSet& ind, const UpdateDerivatives& derivs,
                           const GaussianBelief& input_post, const SonigOptions& opts) {
  const Eigen::Index d = input_post.size();
  const Matrix& S = input_post.cov;

  Vector mean = derivs.mu_u_new;
  if (opts.second_order_mean) {
    for (Eigen::Index j = 0; j < d; ++j) {
      for (Eigen::Index l = 0; l < d; ++l) {
        const double sjl = S(j, l);
        if (sjl != 0.0) mean += 0.5 * sjl * derivs.d2mu_u.col(j * d + l);
      }
    }
  }

  Matrix cov = derivs.sigma_uu_new + derivs.dmu_u * S * derivs.dmu_u.transpose();
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index l = 0; l < d; ++l) {
      const double sjl = S(j, l);
      if (sjl != 0.0) cov += 0.5 * sjl * derivs.d2sigma_uu[static_cast<std::size_t>(j * d + l)];
    }
  }

  GaussianBelief b(std::move(mean), std::move(cov));
  b.symmetrize();
  double repaired = 0.0;
  const auto L = ind.chol_kuu().matrixL();
  Matrix T = L.solve(Matrix(L.solve(b.cov).transpose()));
  T = 0.5 * (T + T.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> white(T, Eigen::EigenvaluesOnly);
  const double t_max = white.eigenvalues().maxCoeff();
  if (t_max > opts.prior_var_tol) {
    white.compute(T);
    const Matrix V = Matrix(L) * white.eigenvectors();
    b.cov = V * white.eigenvalues().cwiseMax(0.0).cwiseMin(1.0).asDiagonal() * V.transpose();
    b.symmetrize();
    repaired = t_max;
  } else {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(b.cov, Eigen::EigenvaluesOnly);
    const double min_eig = eig.eigenvalues().minCoeff();
    if (min_eig < -opts.psd_tol * ind.hyp().alpha_sq) {
      b.clip_eigenvalues(0.0);
      repaired = min_eig;
    }
  }
  ind.set_belief(std::move(b));
  return repaired;
}

SonigModel::SonigModel(const Matrix& xu, std::vector<Hyperparameters> hyp) {
  if (hyp.empty()) throw InputError("SonigModel: needs at least one output");
  const int dx = hyp.front().input_dim();
  for (const Hyperparameters& h : hyp) {
    h.validate();
    if (h.input_dim() != dx) throw InputError("SonigModel: outputs disagree on input dimension");
    const Vector& sx0 = hyp.front().sigma_x_diag;
    if (h.sigma_x_diag.size() != sx0.size() ||
        (sx0.size() != 0 && (h.sigma_x_diag - sx0).cwiseAbs().maxCoeff() > 0.0)) {
      throw InputError("SonigModel: input noise covariance must be shared across outputs");
    }
  }
  outputs_.reserve(hyp.size());
  for (Hyperparameters& h : hyp) {
    outputs_.emplace_back(xu, std::move(h));
  }
}

double SonigModel::nearest_normalized_distance(const Vector& x) const {
  double best = std::numeric_limits<double>::infinity();
  for (const InducingSet& ind : outputs_) {
    best = std::min(best, ind.nearest_normalized_distance(x));
  }
  return best;
}

void SonigModel::add_inducing_point(const Vector& x) {
  for (InducingSet& ind : outputs_) {
    ind.add_points(x);
  }
}

SonigUpdateResult sonig_update(SonigModel& model, const NoisyMeasurement& meas,
                               const SonigOptions& opts) {
  meas.validate(model.input_dim(), model.output_dim());

  SonigUpdateResult result;
  result.input_post = input_posterior(model.outputs(), meas, opts);

  std::vector<UpdateDerivatives> derivs;
  derivs.reserve(static_cast<std::size_t>(model.output_dim()));
  for (int i = 0; i < model.output_dim(); ++i) {
    UpdateDerivatives dv = update_derivatives(model.output(i), result.input_post.mean,
                                              meas.y_hat(i), meas.sigma_f_diag(i));
    const double gate = opts.innovation_gate;
    if (gate > 0.0 && dv.q * dv.q > gate * gate * dv.p) {
      const double sigma_pp = dv.p - dv.sigma_f;
      dv = update_derivatives(model.output(i), result.input_post.mean, meas.y_hat(i),
                              dv.q * dv.q / (gate * gate) - sigma_pp);
      ++model.gated_updates;
    }
    derivs.push_back(std::move(dv));
  }
  result.output_post = output_posterior(derivs, meas, result.input_post);

  for (int i = 0; i < model.output_dim(); ++i) {
    const UpdateDerivatives& dv = derivs[static_cast<std::size_t>(i)];
    const double first = (dv.mu_u_new - model.output(i).belief().mean).norm();
    Vector corr = Vector::Zero(model.inducing_count());
    const Matrix& S = result.input_post.cov;
    for (Eigen::Index j = 0; j < S.rows(); ++j) {
      for (Eigen::Index l = 0; l < S.cols(); ++l) {
        if (S(j, l) != 0.0) corr += 0.5 * S(j, l) * dv.d2mu_u.col(j * S.rows() + l);
      }
    }
    result.correction_ratio =
        std::max(result.correction_ratio, corr.norm() / (first + 1e-12));
    if (apply_taylor_update(model.output(i), dv, result.input_post, opts) != 0.0) {
      ++model.psd_repairs;
    }
  }
  return result;
}

}  // namespace sonig
