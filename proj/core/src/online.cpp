#include "sonig/online.hpp"

#include <cmath>

#include "sonig/errors.hpp"

namespace sonig {

PointPrediction online_predict_point(const InducingSet& ind, const Vector& x) {
  PointPrediction out;
  out.k_uplus = kernel_vector(ind.points(), x, ind.hyp());
  out.kuu_inv_k = ind.solve_kuu(out.k_uplus);
  out.mean = out.kuu_inv_k.dot(ind.belief().mean);
  out.sigma_uplus = ind.belief().cov * out.kuu_inv_k;
  out.variance = ind.hyp().alpha_sq - out.k_uplus.dot(out.kuu_inv_k) +
                 out.kuu_inv_k.dot(out.sigma_uplus);
  return out;
}

void online_update(InducingSet& ind, const Vector& x, double y, double sigma_meas_sq) {
  if (!(sigma_meas_sq >= 0.0) || !std::isfinite(sigma_meas_sq)) {
    throw InputError("online_update: measurement noise variance must be nonnegative");
  }
  if (!std::isfinite(y)) throw InputError("online_update: target must be finite");

  const PointPrediction p = online_predict_point(ind, x);
  const double denom = p.variance + sigma_meas_sq;
  if (!(denom > 0.0)) {
    throw NumericalError("online_update: nonpositive innovation variance");
  }
  GaussianBelief& b = ind.belief();
  b.mean += p.sigma_uplus * ((y - p.mean) / denom);
  b.cov -= (p.sigma_uplus * p.sigma_uplus.transpose()) / denom;
  b.symmetrize();
}

}  // namespace sonig
