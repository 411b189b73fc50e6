#pragma once

#include "sonig/belief.hpp"

namespace sonig {

struct RegressionMetrics {
  double mse{0.0};
  double rmse{0.0};
  // Average reported predictive variance; mse / mean_variance near one means
  // the model's confidence matches its actual accuracy.
  double mean_variance{0.0};
  double ratio{0.0};
};

RegressionMetrics evaluate_predictions(const Vector& mean, const Vector& variance,
                                       const Vector& truth);

double root_mean_square_error(const Vector& predicted, const Vector& truth);

}  // namespace sonig
