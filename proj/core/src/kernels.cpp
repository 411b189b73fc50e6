#include "sonig/kernels.hpp"

#include <cmath>

#include "sonig/errors.hpp"

namespace sonig {

Matrix Hyperparameters::sigma_x() const {
  const int d = input_dim();
  if (sigma_x_diag.size() == 0) return Matrix::Zero(d, d);
  return Matrix(sigma_x_diag.asDiagonal());
}

void Hyperparameters::validate() const {
  if (!(alpha_sq > 0.0) || !std::isfinite(alpha_sq)) {
    throw InputError("Hyperparameters: alpha_sq must be positive and finite");
  }
  if (lambda_diag.size() == 0) {
    throw InputError("Hyperparameters: lambda_diag must not be empty");
  }
  for (Eigen::Index i = 0; i < lambda_diag.size(); ++i) {
    if (!(lambda_diag(i) > 0.0) || !std::isfinite(lambda_diag(i))) {
      throw InputError("Hyperparameters: lambda_diag entries must be positive and finite");
    }
  }
  if (!(sigma_n_sq >= 0.0) || !std::isfinite(sigma_n_sq)) {
    throw InputError("Hyperparameters: sigma_n_sq must be nonnegative and finite");
  }
  if (sigma_x_diag.size() != 0 && sigma_x_diag.size() != lambda_diag.size()) {
    throw InputError("Hyperparameters: sigma_x_diag must be empty or sized like lambda_diag");
  }
  for (Eigen::Index i = 0; i < sigma_x_diag.size(); ++i) {
    if (!(sigma_x_diag(i) >= 0.0) || !std::isfinite(sigma_x_diag(i))) {
      throw InputError("Hyperparameters: sigma_x_diag entries must be nonnegative and finite");
    }
  }
}

Hyperparameters Hyperparameters::isotropic(int dim, double alpha_sq, double lambda,
                                           double sigma_n_sq, double sigma_x) {
  Hyperparameters hyp;
  hyp.alpha_sq = alpha_sq;
  hyp.lambda_diag = Vector::Constant(dim, lambda);
  hyp.sigma_n_sq = sigma_n_sq;
  hyp.sigma_x_diag = Vector::Constant(dim, sigma_x);
  hyp.validate();
  return hyp;
}

double se_kernel(const Vector& a, const Vector& b, const Hyperparameters& hyp) {
  const Vector diff = a - b;
  const double dist = diff.cwiseQuotient(hyp.lambda_diag).dot(diff);
  return hyp.alpha_sq * std::exp(-0.5 * dist);
}

Matrix kernel_matrix(const Matrix& A, const Matrix& B, const Hyperparameters& hyp) {
  if (A.rows() != hyp.input_dim() || B.rows() != hyp.input_dim()) {
    throw InputError("kernel_matrix: point dimension does not match lambda_diag");
  }
  const Vector inv_sqrt = hyp.lambda_diag.cwiseSqrt().cwiseInverse();
  const Matrix As = inv_sqrt.asDiagonal() * A;
  const Matrix Bs = inv_sqrt.asDiagonal() * B;
  const Vector an = As.colwise().squaredNorm();
  const Vector bn = Bs.colwise().squaredNorm();
  Matrix out = -2.0 * (As.transpose() * Bs);
  out.colwise() += an;
  out.rowwise() += bn.transpose();
  return hyp.alpha_sq * (-0.5 * out.array()).exp().matrix();
}

Vector kernel_vector(const Matrix& X, const Vector& x, const Hyperparameters& hyp) {
  if (X.rows() != x.size() || x.size() != hyp.input_dim()) {
    throw InputError("kernel_vector: point dimension does not match lambda_diag");
  }
  const Eigen::Index n = X.cols();
  Vector out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vector diff = X.col(i) - x;
    out(i) = hyp.alpha_sq * std::exp(-0.5 * diff.cwiseQuotient(hyp.lambda_diag).dot(diff));
  }
  return out;
}

RowVector se_kernel_dx(const Vector& a, const Vector& x, const Hyperparameters& hyp) {
  const double k = se_kernel(a, x, hyp);
  return k * (a - x).cwiseQuotient(hyp.lambda_diag).transpose();
}

Matrix se_kernel_dxdx(const Vector& a, const Vector& x, const Hyperparameters& hyp) {
  const double k = se_kernel(a, x, hyp);
  const Vector r = (a - x).cwiseQuotient(hyp.lambda_diag);
  Matrix out = k * (r * r.transpose());
  out.diagonal() -= k * hyp.lambda_diag.cwiseInverse();
  return out;
}

Matrix kernel_grad(const Matrix& X, const Vector& x, const Hyperparameters& hyp) {
  const Vector k = kernel_vector(X, x, hyp);
  const Eigen::Index n = X.cols();
  Matrix out(n, x.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    out.row(i) = k(i) * (X.col(i) - x).cwiseQuotient(hyp.lambda_diag).transpose();
  }
  return out;
}

Matrix kernel_hess_rows(const Matrix& X, const Vector& x, const Hyperparameters& hyp) {
  const Vector k = kernel_vector(X, x, hyp);
  const Eigen::Index n = X.cols();
  const Eigen::Index d = x.size();
  const Vector inv_lambda = hyp.lambda_diag.cwiseInverse();
  Matrix out(n, d * d);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vector r = (X.col(i) - x).cwiseQuotient(hyp.lambda_diag);
    for (Eigen::Index j = 0; j < d; ++j) {
      for (Eigen::Index l = 0; l < d; ++l) {
        double v = k(i) * r(j) * r(l);
        if (j == l) v -= k(i) * inv_lambda(j);
        out(i, j * d + l) = v;
      }
    }
  }
  return out;
}

}  // namespace sonig
