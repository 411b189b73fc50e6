#include "sonig/gp.hpp"

#include <cmath>

#include "sonig/errors.hpp"

namespace sonig {

namespace {

void check_training(const Matrix& X, const Vector& y, const Hyperparameters& hyp) {
  hyp.validate();
  if (X.rows() != hyp.input_dim()) throw InputError("gp: input dimension mismatch");
  if (X.cols() != y.size()) throw InputError("gp: number of inputs and targets differ");
}

}  // namespace

GaussianBelief exact_gp_posterior(const Matrix& X, const Vector& y, const Matrix& Xstar,
                                  const Hyperparameters& hyp) {
  return exact_gp_posterior(X, y, Xstar, hyp,
                            Vector::Constant(y.size(), hyp.sigma_n_sq));
}

GaussianBelief exact_gp_posterior(const Matrix& X, const Vector& y, const Matrix& Xstar,
                                  const Hyperparameters& hyp, const Vector& noise_diag) {
  check_training(X, y, hyp);
  if (noise_diag.size() != y.size()) throw InputError("gp: noise_diag size mismatch");
  if (Xstar.rows() != hyp.input_dim()) throw InputError("gp: test point dimension mismatch");

  if (y.size() == 0) {
    GaussianBelief prior;
    prior.mean = Vector::Zero(Xstar.cols());
    prior.cov = kernel_matrix(Xstar, Xstar, hyp);
    return prior;
  }

  Matrix K = kernel_matrix(X, X, hyp);
  K += Matrix(noise_diag.asDiagonal());
  Eigen::LDLT<Matrix> ldlt(K);
  const Vector vd = ldlt.vectorD();
  if (ldlt.info() != Eigen::Success || vd.minCoeff() <= 1e-14 * vd.maxCoeff()) {
    throw NumericalError("exact_gp_posterior: K + Sigma_n is not positive definite");
  }
  const Matrix Kxs = kernel_matrix(X, Xstar, hyp);
  const Vector alpha = ldlt.solve(y);
  const Matrix V = ldlt.solve(Kxs);

  GaussianBelief out;
  out.mean = Kxs.transpose() * alpha;
  out.cov = kernel_matrix(Xstar, Xstar, hyp) - Kxs.transpose() * V;
  out.symmetrize();
  return out;
}

InducingSet::InducingSet(Matrix xu, Hyperparameters hyp)
    : xu_(std::move(xu)), hyp_(std::move(hyp)) {
  hyp_.validate();
  if (xu_.cols() == 0) throw InputError("InducingSet: needs at least one point");
  if (xu_.rows() != hyp_.input_dim()) throw InputError("InducingSet: point dimension mismatch");
  factorize();
  belief_.mean = Vector::Zero(xu_.cols());
  belief_.cov = kuu_;
}

void InducingSet::factorize() {
  kuu_ = kernel_matrix(xu_, xu_, hyp_);
  Matrix reg = kuu_;
  reg.diagonal().array() += kJitterScale * hyp_.alpha_sq;
  llt_.compute(reg);
  if (llt_.info() != Eigen::Success) {
    throw NumericalError("InducingSet: kernel matrix factorization failed");
  }
}

void InducingSet::set_belief(GaussianBelief b) {
  if (b.mean.size() != count() || b.cov.rows() != count() || b.cov.cols() != count()) {
    throw InputError("InducingSet: belief size does not match point count");
  }
  belief_ = std::move(b);
  belief_.symmetrize();
}

void InducingSet::add_points(const Matrix& xu_new) {
  if (xu_new.cols() == 0) throw InputError("InducingSet::add_points: no points given");
  if (xu_new.rows() != dim()) throw InputError("InducingSet::add_points: dimension mismatch");
  constexpr double tol = 1e-9;
  for (Eigen::Index j = 0; j < xu_new.cols(); ++j) {
    if (nearest_normalized_distance(xu_new.col(j)) < tol) {
      throw InputError("InducingSet::add_points: point duplicates an existing one");
    }
    for (Eigen::Index l = j + 1; l < xu_new.cols(); ++l) {
      const Vector diff = xu_new.col(j) - xu_new.col(l);
      if (diff.cwiseQuotient(hyp_.lambda_diag).dot(diff) < tol) {
        throw InputError("InducingSet::add_points: duplicate points in the new set");
      }
    }
  }

  const Eigen::Index n = count();
  const Eigen::Index m = xu_new.cols();
  const Matrix kun = kernel_matrix(xu_, xu_new, hyp_);   // n x m
  const Matrix A = solve_kuu(kun);                       // Kuu^{-1} K_{u,new}
  const Matrix knn = kernel_matrix(xu_new, xu_new, hyp_);

  GaussianBelief b;
  b.mean.resize(n + m);
  b.mean.head(n) = belief_.mean;
  b.mean.tail(m) = A.transpose() * belief_.mean;

  const Matrix cross = belief_.cov * A;                  // n x m
  b.cov.resize(n + m, n + m);
  b.cov.topLeftCorner(n, n) = belief_.cov;
  b.cov.topRightCorner(n, m) = cross;
  b.cov.bottomLeftCorner(m, n) = cross.transpose();
  b.cov.bottomRightCorner(m, m) = knn - kun.transpose() * A + A.transpose() * cross;

  Matrix xu_joined(dim(), n + m);
  xu_joined.leftCols(n) = xu_;
  xu_joined.rightCols(m) = xu_new;
  xu_ = std::move(xu_joined);
  factorize();
  belief_ = std::move(b);
  belief_.symmetrize();
}

void InducingSet::remove_point(Eigen::Index index) {
  if (count() < 2) throw InputError("InducingSet::remove_point: cannot empty the set");
  if (index < 0 || index >= count()) throw InputError("InducingSet::remove_point: index out of range");

  const Eigen::Index n = count();
  std::vector<Eigen::Index> keep;
  keep.reserve(n - 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (i != index) keep.push_back(i);
  }

  Matrix xu(dim(), n - 1);
  for (std::size_t i = 0; i < keep.size(); ++i) xu.col(static_cast<Eigen::Index>(i)) = xu_.col(keep[i]);
  GaussianBelief b = belief_.marginal(keep);

  xu_ = std::move(xu);
  factorize();
  belief_ = std::move(b);
}

double InducingSet::nearest_normalized_distance(const Vector& x) const {
  if (x.size() != dim()) throw InputError("InducingSet: point dimension mismatch");
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < count(); ++i) {
    const Vector diff = xu_.col(i) - x;
    best = std::min(best, diff.cwiseQuotient(hyp_.lambda_diag).dot(diff));
  }
  return best;
}

FitcWorkspace fitc_workspace(const Matrix& X, const InducingSet& ind, const Vector& noise_diag) {
  if (X.rows() != ind.dim()) throw InputError("fitc_workspace: input dimension mismatch");
  if (noise_diag.size() != X.cols()) throw InputError("fitc_workspace: noise_diag size mismatch");

  const Matrix kuf = kernel_matrix(ind.points(), X, ind.hyp());  // n_u x n
  const Matrix A = ind.solve_kuu(kuf);                           // Kuu^{-1} Kuf

  FitcWorkspace ws;
  ws.lambda_n.resize(X.cols());
  for (Eigen::Index i = 0; i < X.cols(); ++i) {
    ws.lambda_n(i) = ind.hyp().alpha_sq - kuf.col(i).dot(A.col(i));
  }
  const Vector g = ws.lambda_n.cwiseMax(0.0) + noise_diag;
  if (g.minCoeff() <= 0.0) {
    throw NumericalError("fitc_workspace: Lambda_n + Sigma_n must be positive definite");
  }
  ws.delta = ind.kuu() + kuf * g.cwiseInverse().asDiagonal() * kuf.transpose();
  ws.delta.diagonal().array() += kJitterScale * ind.hyp().alpha_sq;
  return ws;
}

InducingSet fitc_batch(const Matrix& X, const Vector& y, const Matrix& Xu,
                       const Hyperparameters& hyp) {
  check_training(X, y, hyp);
  InducingSet ind(Xu, hyp);
  if (X.cols() == 0) return ind;

  // Whitened form: with W = L^{-1} Kuf and B = I + W G^{-1} W^T,
  //   mu  = L B^{-1} W G^{-1} y,   Sigma = L B^{-1} L^T.
  // B stays well conditioned even when Kuu does not, which matters once
  // inducing points sit on (or between) training inputs.
  const Matrix kuf = kernel_matrix(Xu, X, hyp);
  const Matrix Ldense = ind.chol_kuu().matrixL();
  const Matrix W = ind.chol_kuu().matrixL().solve(kuf);  // n_u x n

  Vector lambda_n(X.cols());
  for (Eigen::Index i = 0; i < X.cols(); ++i) {
    lambda_n(i) = hyp.alpha_sq - W.col(i).squaredNorm();
  }
  const Vector g = lambda_n.cwiseMax(0.0).array() + hyp.sigma_n_sq;
  if (g.minCoeff() <= 0.0) {
    throw NumericalError("fitc_batch: Lambda_n + Sigma_n must be positive definite");
  }

  const Matrix Ws = W * g.cwiseSqrt().cwiseInverse().asDiagonal();
  Matrix B = Matrix::Identity(Xu.cols(), Xu.cols()) + Ws * Ws.transpose();
  Eigen::LLT<Matrix> b_llt(B);
  if (b_llt.info() != Eigen::Success) {
    throw NumericalError("fitc_batch: information matrix factorization failed");
  }

  GaussianBelief b;
  b.mean = Ldense * b_llt.solve(W * g.cwiseInverse().asDiagonal() * y);
  b.cov = Ldense * b_llt.solve(Matrix(Ldense.transpose()));
  ind.set_belief(std::move(b));
  return ind;
}

GaussianBelief inducing_predict(const InducingSet& ind, const Matrix& Xstar) {
  if (Xstar.rows() != ind.dim()) throw InputError("inducing_predict: point dimension mismatch");
  const Matrix kus = kernel_matrix(ind.points(), Xstar, ind.hyp());  // n_u x m

  // Whitened evaluation: with V = L^{-1} kus, the mean is V^T (L^{-1} mu) and
  // the covariance Kss - V^T V + V^T (L^{-1} Sigma L^{-T}) V. Triangular
  // solves against L lose only sqrt(cond(Kuu)) digits where the plain normal
  // equation form loses cond(Kuu).
  const auto L = ind.chol_kuu().matrixL();
  const Matrix V = L.solve(kus);
  const Vector m = L.solve(ind.belief().mean);
  const Matrix S = L.solve(Matrix(L.solve(ind.belief().cov).transpose()));

  GaussianBelief out;
  out.mean = V.transpose() * m;
  out.cov = kernel_matrix(Xstar, Xstar, ind.hyp()) - V.transpose() * V +
            V.transpose() * S * V;
  out.symmetrize();
  return out;
}

}  // namespace sonig
