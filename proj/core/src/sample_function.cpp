#include "sonig/sample_function.hpp"

#include <cmath>
#include <random>

#include "sonig/errors.hpp"
#include "sonig/gp.hpp"

namespace sonig {

double SampledFunction::operator()(double x) const {
  const Eigen::Index n = grid.size();
  if (n == 0) throw InputError("SampledFunction: empty grid");
  if (x <= grid(0)) return values(0);
  if (x >= grid(n - 1)) return values(n - 1);
  const double step = grid(1) - grid(0);
  const Eigen::Index i = std::min<Eigen::Index>(
      static_cast<Eigen::Index>((x - grid(0)) / step), n - 2);
  const double w = (x - grid(i)) / (grid(i + 1) - grid(i));
  return (1.0 - w) * values(i) + w * values(i + 1);
}

GpFunctionSampler::GpFunctionSampler(double lo, double hi, double spacing,
                                     const Hyperparameters& hyp) {
  if (!(hi > lo) || !(spacing > 0.0)) throw InputError("GpFunctionSampler: bad grid bounds");
  if (hyp.input_dim() != 1) throw InputError("GpFunctionSampler: only scalar inputs supported");
  hyp.validate();

  const Eigen::Index n = static_cast<Eigen::Index>(std::round((hi - lo) / spacing)) + 1;
  grid_ = Vector::LinSpaced(n, lo, lo + spacing * static_cast<double>(n - 1));
  Matrix X(1, n);
  X.row(0) = grid_.transpose();
  Matrix K = kernel_matrix(X, X, hyp);
  K.diagonal().array() += kJitterScale * hyp.alpha_sq;
  Eigen::LLT<Matrix> llt(K);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("GpFunctionSampler: grid covariance factorization failed");
  }
  chol_ = llt.matrixL();
}

SampledFunction GpFunctionSampler::sample(std::uint64_t seed) const {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector z(grid_.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = normal(rng);
  SampledFunction out;
  out.grid = grid_;
  out.values = chol_ * z;
  return out;
}

}  // namespace sonig
