#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>

#include <Eigen/Dense>

#include "heartbeat/error.hpp"
#include "heartbeat/signal_core.hpp"

namespace heartbeat {

struct RlsConfig {
  int order = 16;
  double forgetting = 0.999;
  double init_delta = 0.01;

  void validate() const {
    require(order >= 1, ErrorKind::kInvalidArgument, "rls order must be >= 1");
    require(forgetting > 0.0 && forgetting <= 1.0, ErrorKind::kInvalidArgument,
            "rls forgetting factor must lie in (0, 1]");
    require(init_delta > 0.0 && std::isfinite(init_delta), ErrorKind::kInvalidArgument,
            "rls init_delta must be positive");
  }
};

// Adaptive-filter state. `factor` is a square root S of the inverse
// correlation matrix, P = S * S^T. The Householder update keeps P symmetric
// positive definite by construction but does not keep S triangular.
struct RlsState {
  RlsConfig config;
  Eigen::VectorXd weights;
  Eigen::MatrixXd factor;
  // Tap delay line, newest reference sample first.
  Eigen::VectorXd regressor;
  std::size_t samples_seen = 0;

  int order() const { return config.order; }
  Eigen::MatrixXd inverse_correlation() const { return factor * factor.transpose(); }
};

inline RlsState rls_init(const RlsConfig& config) {
  config.validate();
  RlsState s;
  s.config = config;
  s.weights = Eigen::VectorXd::Zero(config.order);
  s.factor = Eigen::MatrixXd::Identity(config.order, config.order) / std::sqrt(config.init_delta);
  s.regressor = Eigen::VectorXd::Zero(config.order);
  return s;
}

// One step of the noise canceler: shifts `reference` into the delay line,
// returns the a priori error primary - w.u (the cleaned sample), then updates
// the weights and factor.
//
// Householder RLS. The pre-array
//   [ 1   a^T              ]     a = lambda^{-1/2} S^T u
//   [ 0   lambda^{-1/2} S  ]
// is reflected from the right so its first row becomes [||(1,a)||, 0]. The
// post-array holds the scaled gain in its first column and the new S in the
// lower-right block.
inline double rls_step(RlsState& state, double primary, double reference) {
  const Eigen::Index m = state.config.order;
  for (Eigen::Index i = m - 1; i > 0; --i) state.regressor[i] = state.regressor[i - 1];
  state.regressor[0] = reference;

  const double error = primary - state.weights.dot(state.regressor);
  const double inv_sqrt_lambda = 1.0 / std::sqrt(state.config.forgetting);

  const Eigen::VectorXd a = inv_sqrt_lambda * (state.factor.transpose() * state.regressor);
  const double aa = a.squaredNorm();
  if (aa > 0.0) {
    const double norm = std::sqrt(1.0 + aa);
    const Eigen::VectorXd sa = state.factor * a;
    // beta = 2 / (v^T v), with v = (1 - norm, a) written without cancellation.
    const double beta = (1.0 + norm) / (norm * aa);
    const Eigen::VectorXd gain = (inv_sqrt_lambda / (norm * norm)) * sa;
    state.factor.noalias() -= beta * sa * a.transpose();
    state.factor *= inv_sqrt_lambda;
    state.weights += gain * error;
  } else {
    state.factor *= inv_sqrt_lambda;
  }
  ++state.samples_seen;
  return error;
}

// Runs the canceler over a block; state carries over between calls.
inline Signal rls_cancel(std::span<const double> primary, std::span<const double> reference,
                         RlsState& state) {
  require(primary.size() == reference.size(), ErrorKind::kLengthMismatch,
          "primary has " + std::to_string(primary.size()) + " samples, reference has " +
              std::to_string(reference.size()));
  require(state.weights.size() == state.config.order &&
              state.factor.rows() == state.config.order &&
              state.regressor.size() == state.config.order,
          ErrorKind::kInvalidArgument, "rls state does not match its configured order");
  for (std::size_t i = 0; i < primary.size(); ++i) {
    require(std::isfinite(primary[i]) && std::isfinite(reference[i]), ErrorKind::kNonFiniteSample,
            "non-finite input at sample " + std::to_string(i));
  }
  Signal cleaned(primary.size());
  for (std::size_t i = 0; i < primary.size(); ++i) {
    cleaned[i] = rls_step(state, primary[i], reference[i]);
  }
  return cleaned;
}

using AxisStates = std::array<RlsState, 3>;

inline AxisStates make_axis_states(const RlsConfig& config) {
  return {rls_init(config), rls_init(config), rls_init(config)};
}

// Cascade x -> y -> z: each stage cancels what the next axis explains in the
// previous stage's output.
inline Signal cancel_all_axes(std::span<const double> ppg, std::span<const double> accel_x,
                              std::span<const double> accel_y, std::span<const double> accel_z,
                              AxisStates& states) {
  require(accel_x.size() == ppg.size() && accel_y.size() == ppg.size() &&
              accel_z.size() == ppg.size(),
          ErrorKind::kLengthMismatch, "ppg and acceleration windows differ in length");
  Signal stage = rls_cancel(ppg, accel_x, states[0]);
  stage = rls_cancel(stage, accel_y, states[1]);
  return rls_cancel(stage, accel_z, states[2]);
}

}  // namespace heartbeat
