#include "sonig/belief.hpp"

#include "sonig/errors.hpp"

namespace sonig {

GaussianBelief::GaussianBelief(Vector m, Matrix c) : mean(std::move(m)), cov(std::move(c)) {
  if (cov.rows() != mean.size() || cov.cols() != mean.size()) {
    throw InputError("GaussianBelief: covariance shape does not match mean size");
  }
}

GaussianBelief GaussianBelief::dirac(const Vector& point) {
  return GaussianBelief(point, Matrix::Zero(point.size(), point.size()));
}

void GaussianBelief::symmetrize() {
  cov = ((cov + cov.transpose()) * 0.5).eval();
}

double GaussianBelief::clip_eigenvalues(double floor) {
  symmetrize();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
  double min_eig = eig.eigenvalues().minCoeff();
  if (min_eig >= floor) return min_eig;
  Vector clipped = eig.eigenvalues().cwiseMax(floor);
  cov = eig.eigenvectors() * clipped.asDiagonal() * eig.eigenvectors().transpose();
  symmetrize();
  return min_eig;
}

GaussianBelief GaussianBelief::marginal(const std::vector<Eigen::Index>& idx) const {
  GaussianBelief out;
  out.mean.resize(static_cast<Eigen::Index>(idx.size()));
  out.cov.resize(static_cast<Eigen::Index>(idx.size()), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] < 0 || idx[i] >= mean.size()) throw InputError("GaussianBelief::marginal: index out of range");
    out.mean(static_cast<Eigen::Index>(i)) = mean(idx[i]);
    for (std::size_t j = 0; j < idx.size(); ++j) {
      out.cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = cov(idx[i], idx[j]);
    }
  }
  return out;
}

}  // namespace sonig
