#pragma once

#include "sonig/gp.hpp"

namespace sonig {

// Scalar prediction at one input, with the cross covariance against the
// inducing point values that the rank one update needs.
struct PointPrediction {
  double mean{0.0};
  double variance{0.0};
  Vector k_uplus;      // k(Xu, x)
  Vector sigma_uplus;  // Cov[f_u, f_+]
  Vector kuu_inv_k;    // Kuu^{-1} k(Xu, x), reused by callers
};

PointPrediction online_predict_point(const InducingSet& ind, const Vector& x);

// Rank one measurement update of the belief over the inducing point values,
// for one observation y at input x with measurement noise variance
// sigma_meas_sq. Kuu is untouched, so repeated calls stay O(n_u^2).
void online_update(InducingSet& ind, const Vector& x, double y, double sigma_meas_sq);

}  // namespace sonig
