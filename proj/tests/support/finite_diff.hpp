#pragma once

#include <sonig/belief.hpp>

namespace sonig::testing {

// Central difference of a scalar valued function along coordinate j.
template <typename F>
double fd_partial(const F& f, Vector x, Eigen::Index j, double h) {
  x(j) += h;
  const double fp = f(x);
  x(j) -= 2.0 * h;
  const double fm = f(x);
  return (fp - fm) / (2.0 * h);
}

// Central difference of a vector or matrix valued function along coordinate j.
template <typename F>
auto fd_partial_block(const F& f, Vector x, Eigen::Index j, double h) {
  x(j) += h;
  auto fp = f(x);
  x(j) -= 2.0 * h;
  auto fm = f(x);
  return ((fp - fm) / (2.0 * h)).eval();
}

// Norm relative error between a value and its reference, with an absolute
// floor so near zero references do not explode the ratio.
inline double rel_error(double value, double reference, double floor = 1e-8) {
  return std::abs(value - reference) / std::max(std::abs(reference), floor);
}

template <typename A, typename B>
double rel_error_block(const A& value, const B& reference, double floor = 1e-8) {
  return (value - reference).norm() / std::max(reference.norm(), floor);
}

}  // namespace sonig::testing
