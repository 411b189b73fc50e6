#pragma once

#include "sonig/moments.hpp"

namespace sonig {

// Lag structure of the autoregressive regressor. The regressor stacks, newest
// first, output_lags past outputs followed by input_lags past inputs
// (the current input included):
//   x_k = (y_k, ..., y_{k-output_lags+1}, u_k, ..., u_{k-input_lags+1})
struct NarxConfig {
  int output_lags{1};
  int input_lags{1};
  int output_dim{1};
  int input_dim{1};
  // Squared normalized distance beyond which a sample spawns a new inducing point.
  double inducing_threshold{1.0};
  // Write the input posterior of each sample back into the lag window.
  bool posterior_writeback{true};
  // Feed predictive uncertainty back into the window during free runs.
  bool propagate_uncertainty{true};
  SonigOptions sonig;

  int regressor_size() const {
    return output_lags * output_dim + input_lags * input_dim;
  }
  void validate() const;
};

// Joint Gaussian belief over the lag window, including the cross covariances
// between window entries that uncertainty propagation relies on.
class NarxState {
 public:
  explicit NarxState(const NarxConfig& cfg);

  bool warm() const;
  const GaussianBelief& window() const { return window_; }
  const NarxConfig& config() const { return cfg_; }

  // Shifts a new input measurement into the input block. The new entry is
  // uncorrelated with everything already in the window.
  void push_input(const Vector& u_mean, const Matrix& u_cov);

  // Shifts a new output into the output block. cross holds
  // Cov[y_new, window] against the window as it currently stands.
  void push_output(const Vector& y_mean, const Matrix& y_cov, const Matrix& cross);

  // Replaces the whole window belief (posterior writeback).
  void set_window(GaussianBelief b);

 private:
  NarxConfig cfg_;
  GaussianBelief window_;
  int filled_outputs_{0};
  int filled_inputs_{0};
};

struct SysidStepResult {
  bool updated{false};        // false while the lag window is still filling
  bool added_inducing{false};
  GaussianBelief output_post; // posterior over the measured output (empty during warm up)
  GaussianBelief input_post;  // posterior over the regressor (empty during warm up)
};

// One supervised step: consume the input u_k applied at step k and the output
// y_next it produced, update the model and the lag window. Input noise comes
// from the model's input noise covariance (the slots of the newest input),
// output measurement noise from each output's sigma_n_sq.
SysidStepResult sysid_step(SonigModel& model, NarxState& state, const Vector& u,
                           const Vector& y_next, const NarxConfig& cfg);

// Free run simulation: applies the given inputs (columns, du x T) to the model
// starting from a warm state, feeding predictions back through the window.
// Returns one belief over the outputs per step.
std::vector<GaussianBelief> free_run_simulate(const SonigModel& model, NarxState state,
                                              const Matrix& inputs, const NarxConfig& cfg);

}  // namespace sonig
