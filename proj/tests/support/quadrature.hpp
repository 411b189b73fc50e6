#pragma once

#include <cmath>
#include <numbers>

#include <sonig/belief.hpp>
#include <sonig/errors.hpp>

namespace sonig::testing {

// Gauss-Hermite rule adapted to standard normal expectations:
//   E_{z~N(0,1)}[g(z)] ~= sum_i weights(i) * g(nodes(i))
// Nodes and weights come from the symmetric tridiagonal Jacobi matrix
// (Golub-Welsch); weights are the squared first eigenvector components.
struct GaussHermite {
  Vector nodes;
  Vector weights;

  static GaussHermite make(int order) {
    if (order < 1) throw InputError("GaussHermite: order must be positive");
    Matrix J = Matrix::Zero(order, order);
    for (int k = 1; k < order; ++k) {
      const double b = std::sqrt(k / 2.0);  // physicists' recurrence
      J(k - 1, k) = b;
      J(k, k - 1) = b;
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eig(J);
    GaussHermite out;
    // Physicists' nodes integrate against exp(-t^2); rescale by sqrt(2) for
    // the standard normal and fold sqrt(pi) into the weight normalization.
    out.nodes = std::numbers::sqrt2 * eig.eigenvalues();
    out.weights.resize(order);
    for (int i = 0; i < order; ++i) {
      const double v = eig.eigenvectors()(0, i);
      out.weights(i) = v * v;
    }
    return out;
  }
};

// Tensor product expectation of g over N(mean, cov). cov may be singular;
// the transform uses the symmetric square root with clipped eigenvalues.
template <typename F>
double gauss_expectation(const Vector& mean, const Matrix& cov, int order, const F& g) {
  const Eigen::Index d = mean.size();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
  const Vector scale = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Matrix sqrt_cov = eig.eigenvectors() * scale.asDiagonal();

  const GaussHermite gh = GaussHermite::make(order);
  const Eigen::Index n = gh.nodes.size();
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(d), 0);
  double total = 0.0;
  while (true) {
    Vector z(d);
    double w = 1.0;
    for (Eigen::Index k = 0; k < d; ++k) {
      z(k) = gh.nodes(idx[static_cast<std::size_t>(k)]);
      w *= gh.weights(idx[static_cast<std::size_t>(k)]);
    }
    total += w * g((mean + sqrt_cov * z).eval());
    Eigen::Index carry = 0;
    while (carry < d) {
      if (++idx[static_cast<std::size_t>(carry)] < n) break;
      idx[static_cast<std::size_t>(carry)] = 0;
      ++carry;
    }
    if (carry == d) break;
  }
  return total;
}

}  // namespace sonig::testing
