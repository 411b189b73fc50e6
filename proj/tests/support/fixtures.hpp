#pragma once

#include <random>

#include <sonig/online.hpp>
#include <sonig/sonig.hpp>

namespace sonig::testing {

inline Matrix random_points(int d, int n, double lo, double hi, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uniform(lo, hi);
  Matrix out(d, n);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < n; ++j) out(i, j) = uniform(rng);
  }
  return out;
}

inline Vector random_vector(int n, double scale, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, scale);
  Vector out(n);
  for (int i = 0; i < n; ++i) out(i) = normal(rng);
  return out;
}

// A realistic model state: random inducing inputs, belief shaped by a handful
// of rank one updates on random observations.
inline InducingSet random_state(const Hyperparameters& hyp, int n_u, int n_obs,
                                double lo, double hi, std::mt19937_64& rng) {
  InducingSet ind(random_points(hyp.input_dim(), n_u, lo, hi, rng), hyp);
  std::normal_distribution<double> normal(0.0, std::sqrt(hyp.alpha_sq));
  for (int i = 0; i < n_obs; ++i) {
    const Matrix x = random_points(hyp.input_dim(), 1, lo, hi, rng);
    online_update(ind, x.col(0), normal(rng), std::max(hyp.sigma_n_sq, 1e-4));
  }
  return ind;
}

}  // namespace sonig::testing
