#pragma once

#include "sonig/sonig.hpp"

namespace sonig {

// E[k(x_ui, x*)] over x* ~ xstar, for every inducing input of `ind`.
Vector expected_kernel_vector(const InducingSet& ind, const GaussianBelief& xstar);

// E[k_a(x_ui, x*) k_b(x_uj, x*)] over x* ~ xstar; entry (i, j) pairs the
// inducing inputs of `a` and `b`. Both sets must share the same inducing inputs.
Matrix expected_kernel_product(const InducingSet& a, const InducingSet& b,
                               const GaussianBelief& xstar);

// Moment matched posterior over all outputs at a Gaussian distributed test
// point. With xstar.cov = 0 this reduces to inducing_predict at xstar.mean.
GaussianBelief stochastic_predict(const SonigModel& model, const GaussianBelief& xstar);

}  // namespace sonig
