#include "sonig/metrics.hpp"

#include <cmath>

#include "sonig/errors.hpp"

namespace sonig {

RegressionMetrics evaluate_predictions(const Vector& mean, const Vector& variance,
                                       const Vector& truth) {
  if (mean.size() != truth.size() || variance.size() != truth.size()) {
    throw InputError("evaluate_predictions: size mismatch");
  }
  if (mean.size() == 0) throw InputError("evaluate_predictions: empty input");
  RegressionMetrics out;
  out.mse = (mean - truth).squaredNorm() / static_cast<double>(mean.size());
  out.rmse = std::sqrt(out.mse);
  out.mean_variance = variance.mean();
  out.ratio = out.mean_variance > 0.0 ? out.mse / out.mean_variance
                                      : std::numeric_limits<double>::infinity();
  return out;
}

double root_mean_square_error(const Vector& predicted, const Vector& truth) {
  if (predicted.size() != truth.size() || predicted.size() == 0) {
    throw InputError("root_mean_square_error: size mismatch");
  }
  return std::sqrt((predicted - truth).squaredNorm() / static_cast<double>(predicted.size()));
}

}  // namespace sonig
