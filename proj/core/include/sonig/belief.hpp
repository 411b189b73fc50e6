#pragma once

#include <Eigen/Dense>

namespace sonig {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using RowVector = Eigen::RowVectorXd;

// Gaussian distribution over a vector quantity, N(mean, cov).
struct GaussianBelief {
  Vector mean;
  Matrix cov;

  GaussianBelief() = default;
  GaussianBelief(Vector m, Matrix c);

  static GaussianBelief dirac(const Vector& point);

  Eigen::Index size() const { return mean.size(); }

  // Forces cov = (cov + cov^T) / 2.
  void symmetrize();

  // Clips eigenvalues of cov below `floor` up to `floor` and re-symmetrizes.
  // Returns the smallest eigenvalue found before clipping.
  double clip_eigenvalues(double floor = 0.0);

  // Marginal over the listed coordinates, in the listed order.
  GaussianBelief marginal(const std::vector<Eigen::Index>& idx) const;
};

}  // namespace sonig
