#pragma once

#include "sonig/belief.hpp"

namespace sonig {

// Squared exponential kernel parameters for one output dimension, plus the
// noise variances attached to that output. lambda_diag holds squared length
// scales per input dimension, sigma_x_diag the input noise variance per input
// dimension.
struct Hyperparameters {
  double alpha_sq{1.0};
  Vector lambda_diag;
  double sigma_n_sq{0.01};
  Vector sigma_x_diag;

  int input_dim() const { return static_cast<int>(lambda_diag.size()); }

  Matrix sigma_x() const;  // diag(sigma_x_diag) as a dense matrix

  // alpha_sq > 0, lambda_diag > 0, sigma_n_sq >= 0, sigma_x_diag >= 0 and
  // sized like lambda_diag (or empty, meaning noise free inputs).
  void validate() const;

  static Hyperparameters isotropic(int dim, double alpha_sq, double lambda,
                                   double sigma_n_sq, double sigma_x = 0.0);
};

// k(a, b) = alpha_sq * exp(-0.5 * (a-b)^T Lambda^{-1} (a-b))
double se_kernel(const Vector& a, const Vector& b, const Hyperparameters& hyp);

// Pairwise kernel matrix; points are columns, entry (i, j) = k(A.col(i), B.col(j)).
Matrix kernel_matrix(const Matrix& A, const Matrix& B, const Hyperparameters& hyp);

// k(X.col(i), x) stacked into a vector.
Vector kernel_vector(const Matrix& X, const Vector& x, const Hyperparameters& hyp);

// Derivative of k(a, x) with respect to x:
//   dk/dx = k(a, x) * (a - x)^T Lambda^{-1}
RowVector se_kernel_dx(const Vector& a, const Vector& x, const Hyperparameters& hyp);

// Second derivative of k(a, x) with respect to x, with r = Lambda^{-1}(a - x):
//   d2k/dx2 = k(a, x) * (r r^T - Lambda^{-1})
Matrix se_kernel_dxdx(const Vector& a, const Vector& x, const Hyperparameters& hyp);

// Row i = dk(X.col(i), x)/dx, an n x d matrix.
Matrix kernel_grad(const Matrix& X, const Vector& x, const Hyperparameters& hyp);

// Row i = vec(d2k(X.col(i), x)/dx2), an n x d^2 matrix. Column j*d + k holds
// the mixed partial d2k/dx_j dx_k across all points.
Matrix kernel_hess_rows(const Matrix& X, const Vector& x, const Hyperparameters& hyp);

}  // namespace sonig
