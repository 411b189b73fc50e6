#pragma once

#include <vector>

#include <sonig/belief.hpp>
#include <sonig/errors.hpp>

namespace sonig::testing {

// Conditions a joint Gaussian on observing the coordinates in obs_idx.
// Returns the posterior over the remaining coordinates, in their original
// order. Independent of the library's regression code paths on purpose.
inline GaussianBelief condition_gaussian(const Vector& mean, const Matrix& cov,
                                         const std::vector<Eigen::Index>& obs_idx,
                                         const Vector& obs_values) {
  const Eigen::Index n = mean.size();
  std::vector<bool> observed(static_cast<std::size_t>(n), false);
  for (Eigen::Index i : obs_idx) observed[static_cast<std::size_t>(i)] = true;
  std::vector<Eigen::Index> rest;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!observed[static_cast<std::size_t>(i)]) rest.push_back(i);
  }
  const Eigen::Index no = static_cast<Eigen::Index>(obs_idx.size());
  const Eigen::Index nr = static_cast<Eigen::Index>(rest.size());

  Matrix S_oo(no, no), S_ro(nr, no), S_rr(nr, nr);
  Vector m_o(no), m_r(nr);
  for (Eigen::Index i = 0; i < no; ++i) {
    m_o(i) = mean(obs_idx[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j < no; ++j) {
      S_oo(i, j) = cov(obs_idx[static_cast<std::size_t>(i)], obs_idx[static_cast<std::size_t>(j)]);
    }
  }
  for (Eigen::Index i = 0; i < nr; ++i) {
    m_r(i) = mean(rest[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j < no; ++j) {
      S_ro(i, j) = cov(rest[static_cast<std::size_t>(i)], obs_idx[static_cast<std::size_t>(j)]);
    }
    for (Eigen::Index j = 0; j < nr; ++j) {
      S_rr(i, j) = cov(rest[static_cast<std::size_t>(i)], rest[static_cast<std::size_t>(j)]);
    }
  }

  const Matrix gain = S_ro * S_oo.inverse();
  GaussianBelief out;
  out.mean = m_r + gain * (obs_values - m_o);
  out.cov = S_rr - gain * S_ro.transpose();
  out.symmetrize();
  return out;
}

}  // namespace sonig::testing
