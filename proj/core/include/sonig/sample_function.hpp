#pragma once

#include <cstdint>

#include "sonig/kernels.hpp"

namespace sonig {

// One random function drawn from a GP prior, defined by its values on a fine
// grid with linear interpolation in between.
struct SampledFunction {
  Vector grid;
  Vector values;

  double operator()(double x) const;
};

// Draws random smooth functions on [lo, hi] from a zero mean GP prior. The
// grid covariance factorization is done once and shared across draws.
class GpFunctionSampler {
 public:
  GpFunctionSampler(double lo, double hi, double spacing, const Hyperparameters& hyp);

  SampledFunction sample(std::uint64_t seed) const;
  const Vector& grid() const { return grid_; }

 private:
  Vector grid_;
  Matrix chol_;  // lower Cholesky factor of the grid covariance
};

}  // namespace sonig
