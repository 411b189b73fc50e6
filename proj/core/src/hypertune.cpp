#include "sonig/hypertune.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <numeric>
#include <random>

#include "sonig/errors.hpp"

namespace sonig {

namespace {

constexpr double kPenalty = 1e10;
constexpr double kLogBound = 30.0;

void check_data(const Matrix& X, const Vector& y) {
  if (X.cols() != y.size()) throw InputError("hypertune: inputs and targets disagree in count");
  if (X.cols() < 2) throw InputError("hypertune: needs at least two points");
  if (!X.allFinite() || !y.allFinite()) throw InputError("hypertune: data must be finite");
}

// Packing of the search vector: [log alpha_sq, log lambda (d), log sigma_n_sq,
// log sigma_x (d, only when tuned)].
struct Packing {
  int dim;
  bool with_sigma_x;
  int size() const { return with_sigma_x ? 2 * dim + 2 : dim + 2; }

  Vector pack(const Hyperparameters& hyp) const {
    Vector theta(size());
    theta(0) = std::log(hyp.alpha_sq);
    theta.segment(1, dim) = hyp.lambda_diag.array().log();
    theta(dim + 1) = std::log(std::max(hyp.sigma_n_sq, 1e-12));
    if (with_sigma_x) {
      for (int i = 0; i < dim; ++i) {
        theta(dim + 2 + i) = std::log(std::max(hyp.sigma_x_diag(i), 1e-12));
      }
    }
    return theta;
  }

  Hyperparameters unpack(const Vector& theta) const {
    Hyperparameters hyp;
    hyp.alpha_sq = std::exp(theta(0));
    hyp.lambda_diag = theta.segment(1, dim).array().exp();
    hyp.sigma_n_sq = std::exp(theta(dim + 1));
    hyp.sigma_x_diag = with_sigma_x
                           ? Vector(theta.segment(dim + 2, dim).array().exp())
                           : Vector(Vector::Zero(dim));
    return hyp;
  }
};

double objective(const Vector& theta, const Packing& pk, const Matrix& X, const Vector& y,
                 const Matrix& slopes) {
  if (theta.cwiseAbs().maxCoeff() > kLogBound) return kPenalty + theta.cwiseAbs().sum();
  return nigp_neg_log_marginal(pk.unpack(theta), X, y, slopes);
}

Vector numeric_gradient(const std::function<double(const Vector&)>& f, const Vector& theta) {
  const double h = 1e-4;
  Vector g(theta.size());
  Vector probe = theta;
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    probe(i) = theta(i) + h;
    const double fp = f(probe);
    probe(i) = theta(i) - h;
    const double fm = f(probe);
    probe(i) = theta(i);
    g(i) = (fp - fm) / (2.0 * h);
  }
  return g;
}

// Quasi-Newton minimization with numerical gradients and backtracking line
// search. Returns the best point found.
std::pair<Vector, double> minimize(const std::function<double(const Vector&)>& f, Vector theta,
                                   int max_iters, double grad_tol) {
  const Eigen::Index n = theta.size();
  double fx = f(theta);
  Vector g = numeric_gradient(f, theta);
  Matrix H = Matrix::Identity(n, n);

  for (int iter = 0; iter < max_iters; ++iter) {
    if (g.cwiseAbs().maxCoeff() < grad_tol * std::max(1.0, std::abs(fx))) break;
    Vector p = -(H * g);
    if (p.dot(g) >= 0.0) {  // lost descent, restart from steepest descent
      H = Matrix::Identity(n, n);
      p = -g;
    }
    double t = 1.0;
    double f_new = fx;
    Vector theta_new = theta;
    bool accepted = false;
    const double slope = g.dot(p);
    for (int ls = 0; ls < 30; ++ls) {
      theta_new = theta + t * p;
      f_new = f(theta_new);
      if (std::isfinite(f_new) && f_new <= fx + 1e-4 * t * slope) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;

    const Vector g_new = numeric_gradient(f, theta_new);
    const Vector s = theta_new - theta;
    const Vector dg = g_new - g;
    const double sy = s.dot(dg);
    if (sy > 1e-12 * s.norm() * dg.norm()) {
      const Matrix outer = (s * dg.transpose()) / sy;
      H = (Matrix::Identity(n, n) - outer) * H *
              (Matrix::Identity(n, n) - outer.transpose()) +
          (s * s.transpose()) / sy;
    }
    const double improvement = fx - f_new;
    theta = theta_new;
    fx = f_new;
    g = g_new;
    if (improvement < 1e-10 * (1.0 + std::abs(fx))) break;
  }
  return {theta, fx};
}

Vector initial_theta(const Matrix& X, const Vector& y, const Packing& pk) {
  const int d = pk.dim;
  Hyperparameters hyp;
  const double y_var = std::max((y.array() - y.mean()).square().mean(), 1e-6);
  hyp.alpha_sq = y_var;
  hyp.lambda_diag.resize(d);
  for (int i = 0; i < d; ++i) {
    const double range = X.row(i).maxCoeff() - X.row(i).minCoeff();
    const double scale = std::max(0.2 * range, 1e-3);
    hyp.lambda_diag(i) = scale * scale;
  }
  hyp.sigma_n_sq = std::max(0.1 * y_var, 1e-8);
  hyp.sigma_x_diag = hyp.lambda_diag / 100.0;
  return pk.pack(hyp);
}

}  // namespace

Vector slope_noise(const Matrix& slopes, const Hyperparameters& hyp) {
  if (slopes.rows() != hyp.input_dim()) throw InputError("slope_noise: slope dimension mismatch");
  Vector out = Vector::Constant(slopes.cols(), hyp.sigma_n_sq);
  if (hyp.sigma_x_diag.size() == 0) return out;
  for (Eigen::Index i = 0; i < slopes.cols(); ++i) {
    out(i) += slopes.col(i).dot(hyp.sigma_x_diag.cwiseProduct(slopes.col(i)));
  }
  return out;
}

double nigp_neg_log_marginal(const Hyperparameters& hyp, const Matrix& X, const Vector& y,
                             const Matrix& slopes) {
  check_data(X, y);
  hyp.validate();
  if (slopes.cols() != X.cols()) throw InputError("nigp_neg_log_marginal: slopes count mismatch");

  const Eigen::Index n = y.size();
  Matrix K = kernel_matrix(X, X, hyp);
  K += Matrix(slope_noise(slopes, hyp).asDiagonal());
  Eigen::LDLT<Matrix> ldlt(K);
  if (ldlt.info() != Eigen::Success || ldlt.vectorD().minCoeff() <= 0.0) {
    return kPenalty;
  }
  const double quad = y.dot(ldlt.solve(y));
  const double log_det = ldlt.vectorD().array().log().sum();
  const double value =
      0.5 * (quad + log_det + static_cast<double>(n) * std::log(2.0 * std::numbers::pi));
  return std::isfinite(value) ? value : kPenalty;
}

Matrix posterior_mean_slopes(const Matrix& X, const Vector& y, const Hyperparameters& hyp,
                             const Matrix& slopes_for_noise) {
  check_data(X, y);
  hyp.validate();
  Matrix K = kernel_matrix(X, X, hyp);
  const Matrix K_plain = K;
  K += Matrix(slope_noise(slopes_for_noise, hyp).asDiagonal());
  Eigen::LDLT<Matrix> ldlt(K);
  if (ldlt.info() != Eigen::Success || ldlt.vectorD().minCoeff() <= 0.0) {
    throw NumericalError("posterior_mean_slopes: noise corrected kernel matrix is singular");
  }
  const Vector beta = ldlt.solve(y);

  const Eigen::Index n = X.cols();
  const int d = hyp.input_dim();
  Matrix slopes(d, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Vector s = Vector::Zero(d);
    for (Eigen::Index j = 0; j < n; ++j) {
      s += beta(j) * K_plain(i, j) * (X.col(j) - X.col(i)).cwiseQuotient(hyp.lambda_diag);
    }
    slopes.col(i) = s;
  }
  return slopes;
}

Hyperparameters tune_sod(const Matrix& X, const Vector& y, const TuneConfig& cfg,
                         std::vector<double>* round_objectives) {
  check_data(X, y);
  if (cfg.subset_size < 10) throw InputError("tune_sod: subset_size must be at least 10");
  if (cfg.restarts < 1 || cfg.fixed_point_iters < 1) {
    throw InputError("tune_sod: restarts and fixed_point_iters must be positive");
  }
  if (round_objectives) round_objectives->clear();

  std::mt19937_64 rng(cfg.seed);
  const Eigen::Index n = X.cols();
  const Eigen::Index m = std::min<Eigen::Index>(cfg.subset_size, n);
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  std::shuffle(idx.begin(), idx.end(), rng);
  Matrix Xs(X.rows(), m);
  Vector ys(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    Xs.col(i) = X.col(idx[static_cast<std::size_t>(i)]);
    ys(i) = y(idx[static_cast<std::size_t>(i)]);
  }

  const Packing pk{static_cast<int>(X.rows()), cfg.tune_sigma_x};
  Matrix slopes = Matrix::Zero(X.rows(), m);
  auto make_f = [&](const Matrix& s) {
    return [&, s](const Vector& theta) { return objective(theta, pk, Xs, ys, s); };
  };

  const Vector theta0 = initial_theta(Xs, ys, pk);
  std::uniform_real_distribution<double> jitter(-1.5, 1.5);

  Vector best_theta;
  double best_f = std::numeric_limits<double>::infinity();
  for (int r = 0; r < cfg.restarts; ++r) {
    Vector start = theta0;
    if (r > 0) {
      for (Eigen::Index i = 0; i < start.size(); ++i) start(i) += jitter(rng);
    }
    auto [theta, fx] = minimize(make_f(slopes), start, cfg.max_opt_iters, cfg.grad_tol);
    if (fx < best_f) {
      best_f = fx;
      best_theta = theta;
    }
  }
  if (!best_theta.size()) throw NumericalError("tune_sod: optimization produced no candidate");
  if (round_objectives) round_objectives->push_back(best_f);

  for (int round = 1; round < cfg.fixed_point_iters; ++round) {
    slopes = posterior_mean_slopes(Xs, ys, pk.unpack(best_theta), slopes);
    auto [theta, fx] = minimize(make_f(slopes), best_theta, cfg.max_opt_iters, cfg.grad_tol);
    best_theta = theta;
    best_f = fx;
    if (round_objectives) round_objectives->push_back(best_f);
  }
  return pk.unpack(best_theta);
}

GaussianBelief nigp_predict(const Matrix& X, const Vector& y, const Hyperparameters& hyp,
                            const Matrix& Xstar) {
  check_data(X, y);
  hyp.validate();
  const Matrix zero_slopes = Matrix::Zero(X.rows(), X.cols());
  if (hyp.sigma_x_diag.size() == 0 || hyp.sigma_x_diag.cwiseAbs().maxCoeff() == 0.0) {
    return exact_gp_posterior(X, y, Xstar, hyp);
  }
  const Matrix slopes = posterior_mean_slopes(X, y, hyp, zero_slopes);
  return exact_gp_posterior(X, y, Xstar, hyp, slope_noise(slopes, hyp));
}

}  // namespace sonig
