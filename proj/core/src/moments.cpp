#include "sonig/moments.hpp"

#include <cmath>

#include "sonig/errors.hpp"

namespace sonig {

namespace {

void check_test_point(const GaussianBelief& xstar, int dim) {
  if (xstar.mean.size() != dim) throw InputError("moments: test point dimension mismatch");
  if (xstar.cov.rows() != dim || xstar.cov.cols() != dim) {
    throw InputError("moments: test point covariance shape mismatch");
  }
  const double scale = 1.0 + xstar.cov.cwiseAbs().maxCoeff();
  if ((xstar.cov - xstar.cov.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw InputError("moments: test point covariance must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(xstar.cov, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-10 * scale) {
    throw InputError("moments: test point covariance must be positive semidefinite");
  }
}

// Gaussian weighted kernel integral against N(mean, spread + cov):
//   amp / sqrt(|spread + cov| / |spread|) * exp(-0.5 r^T (spread + cov)^{-1} r)
// with spread diagonal. Returns the shared solver pieces for reuse.
struct WeightedExp {
  Eigen::LDLT<Matrix> ldlt;
  double det_factor;  // 1 / sqrt(|spread + cov| / |spread|)
};

WeightedExp weighted_exp(const Vector& spread_diag, const Matrix& cov) {
  Matrix total = cov;
  total.diagonal() += spread_diag;
  WeightedExp out;
  out.ldlt.compute(total);
  if (out.ldlt.info() != Eigen::Success || out.ldlt.vectorD().minCoeff() <= 0.0) {
    throw NumericalError("moments: length scale plus test covariance not positive definite");
  }
  const double log_det_total = out.ldlt.vectorD().array().log().sum();
  const double log_det_spread = spread_diag.array().log().sum();
  out.det_factor = std::exp(-0.5 * (log_det_total - log_det_spread));
  return out;
}

}  // namespace

Vector expected_kernel_vector(const InducingSet& ind, const GaussianBelief& xstar) {
  check_test_point(xstar, ind.dim());
  const WeightedExp we = weighted_exp(ind.hyp().lambda_diag, xstar.cov);
  const Eigen::Index nu = ind.count();
  Vector out(nu);
  for (Eigen::Index i = 0; i < nu; ++i) {
    const Vector r = ind.points().col(i) - xstar.mean;
    out(i) = ind.hyp().alpha_sq * we.det_factor * std::exp(-0.5 * r.dot(we.ldlt.solve(r)));
  }
  return out;
}

Matrix expected_kernel_product(const InducingSet& a, const InducingSet& b,
                               const GaussianBelief& xstar) {
  check_test_point(xstar, a.dim());
  if (a.dim() != b.dim() || a.count() != b.count()) {
    throw InputError("moments: inducing sets must share their inducing inputs");
  }
  const Vector& la = a.hyp().lambda_diag;
  const Vector& lb = b.hyp().lambda_diag;
  // Harmonic combination (Lambda_a^{-1} + Lambda_b^{-1})^{-1}, diagonal.
  const Vector e = (la.cwiseProduct(lb)).cwiseQuotient(la + lb);
  const Vector sum_inv = (la + lb).cwiseInverse();
  const WeightedExp we = weighted_exp(e, xstar.cov);

  const Eigen::Index nu = a.count();
  const double amp = a.hyp().alpha_sq * b.hyp().alpha_sq;
  Matrix out(nu, nu);
  const bool same_kernel = (la - lb).cwiseAbs().maxCoeff() == 0.0 &&
                           a.hyp().alpha_sq == b.hyp().alpha_sq;
  for (Eigen::Index i = 0; i < nu; ++i) {
    const Eigen::Index j0 = same_kernel ? i : 0;
    for (Eigen::Index j = j0; j < nu; ++j) {
      const Vector xi = a.points().col(i);
      const Vector xj = b.points().col(j);
      const Vector diff = xi - xj;
      const double pair_term = diff.cwiseProduct(sum_inv).dot(diff);
      const Vector xbar =
          e.cwiseProduct(xi.cwiseQuotient(la) + xj.cwiseQuotient(lb));
      const Vector r = xbar - xstar.mean;
      const double v = amp * we.det_factor *
                       std::exp(-0.5 * (pair_term + r.dot(we.ldlt.solve(r))));
      out(i, j) = v;
      if (same_kernel) out(j, i) = v;
    }
  }
  return out;
}

GaussianBelief stochastic_predict(const SonigModel& model, const GaussianBelief& xstar) {
  check_test_point(xstar, model.input_dim());
  const int dy = model.output_dim();
  const Eigen::Index nu = model.inducing_count();

  std::vector<Vector> beta(static_cast<std::size_t>(dy));
  std::vector<Vector> q(static_cast<std::size_t>(dy));
  for (int k = 0; k < dy; ++k) {
    const InducingSet& ind = model.output(k);
    beta[static_cast<std::size_t>(k)] = ind.solve_kuu(ind.belief().mean);
    q[static_cast<std::size_t>(k)] = expected_kernel_vector(ind, xstar);
  }

  GaussianBelief out;
  out.mean.resize(dy);
  out.cov.resize(dy, dy);
  for (int k = 0; k < dy; ++k) {
    out.mean(k) = q[static_cast<std::size_t>(k)].dot(beta[static_cast<std::size_t>(k)]);
  }
  for (int k = 0; k < dy; ++k) {
    for (int l = k; l < dy; ++l) {
      const Matrix Q = expected_kernel_product(model.output(k), model.output(l), xstar);
      double v = beta[static_cast<std::size_t>(k)].dot(Q * beta[static_cast<std::size_t>(l)]) -
                 out.mean(k) * out.mean(l);
      if (l == k) {
        const InducingSet& ind = model.output(k);
        const Matrix inv = ind.solve_kuu(Matrix(Matrix::Identity(nu, nu)));
        const Matrix weight = inv - inv * ind.belief().cov * inv;  // Kuu^{-1}(Kuu - Suu)Kuu^{-1}
        v += ind.hyp().alpha_sq - weight.cwiseProduct(Q).sum();
      }
      out.cov(k, l) = v;
      out.cov(l, k) = v;
    }
  }
  out.symmetrize();
  // Moment matching can leave tiny negative eigenvalues behind; clear them.
  Eigen::SelfAdjointEigenSolver<Matrix> eig(out.cov, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < 0.0) out.clip_eigenvalues(0.0);
  return out;
}

}  // namespace sonig
