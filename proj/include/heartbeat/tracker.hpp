#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "heartbeat/error.hpp"
#include "heartbeat/spectrum.hpp"

namespace heartbeat {

struct TrackerConfig {
  double delta_h_init = 12.0;
  double hold_increment = 5.0;
  int max_consecutive_holds = 4;
  double prediction_step = 5.0;
  double post_prediction_increment = 8.0;
  int regression_points = 10;
  int bootstrap_windows = 3;
  // After a prediction the hold counter restarts, so holds may resume.
  // When false, every further window without a valid peak predicts again.
  bool reset_holds_after_prediction = true;

  void validate() const {
    require(delta_h_init > 0 && hold_increment > 0 && max_consecutive_holds > 0 &&
                prediction_step > 0 && post_prediction_increment > 0 && regression_points > 0,
            ErrorKind::kInvalidArgument, "tracker parameters must be positive");
    require(bootstrap_windows >= 1, ErrorKind::kInvalidArgument, "bootstrap_windows must be >= 1");
  }
};

struct TrackerState {
  std::vector<double> history;
  double delta_h = 12.0;
  int consecutive_holds = 0;
  // 1-based index of the next window to be tracked.
  std::size_t window_index = 1;
};

inline TrackerState make_tracker_state(const TrackerConfig& config) {
  config.validate();
  TrackerState s;
  s.delta_h = config.delta_h_init;
  return s;
}

enum class TrackerBranch { kBootstrap, kSelect, kHold, kPredict };

struct TrackStep {
  double bpm = 0.0;
  TrackerBranch branch = TrackerBranch::kBootstrap;
  // Change limit that was in force while this window was decided.
  double delta_h = 0.0;
};

namespace detail {

// Least-squares line through (index, value) pairs, evaluated at `at`.
inline double extrapolate_linear(std::span<const double> values, double first_index, double at) {
  const std::size_t m = values.size();
  if (m == 1) return values[0];
  double mean_x = 0.0, mean_y = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    mean_x += first_index + static_cast<double>(i);
    mean_y += values[i];
  }
  mean_x /= static_cast<double>(m);
  mean_y /= static_cast<double>(m);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double dx = first_index + static_cast<double>(i) - mean_x;
    sxy += dx * (values[i] - mean_y);
    sxx += dx * dx;
  }
  return mean_y + (sxy / sxx) * (at - mean_x);
}

inline double signum(double x) { return static_cast<double>((x > 0.0) - (x < 0.0)); }

}  // namespace detail

// Decides the estimate for one window. Exactly one branch fires:
// bootstrap (channel-1 argmax), select (a peak within +-delta_h of the last
// estimate), hold (repeat the last estimate) or predict (step toward the
// linear trend of recent estimates).
inline TrackStep track_window(const Spectrum& spectrum_ch1, std::span<const Peak> peaks_ch1,
                              std::span<const Peak> peaks_ch2, TrackerState& state,
                              const TrackerConfig& config) {
  require(state.history.size() + 1 == state.window_index, ErrorKind::kInvariant,
          "tracker history length does not match the window index");
  TrackStep step;
  step.delta_h = state.delta_h;

  if (state.window_index <= static_cast<std::size_t>(config.bootstrap_windows)) {
    require(!spectrum_ch1.empty(), ErrorKind::kInvalidArgument,
            "empty spectrum during tracker bootstrap");
    step.bpm = spectrum_ch1.argmax_bpm();
    step.branch = TrackerBranch::kBootstrap;
    state.delta_h = config.delta_h_init;
    state.consecutive_holds = 0;
  } else {
    const double previous = state.history.back();
    const double lo = previous - state.delta_h;
    const double hi = previous + state.delta_h;
    const Peak* best = nullptr;
    auto better = [previous](const Peak& cand, const Peak& cur) {
      if (cand.magnitude != cur.magnitude) return cand.magnitude > cur.magnitude;
      const double dc = std::abs(cand.bpm - previous);
      const double dr = std::abs(cur.bpm - previous);
      if (dc != dr) return dc < dr;
      return cand.bpm < cur.bpm;
    };
    for (const auto list : {peaks_ch1, peaks_ch2}) {
      for (const Peak& p : list) {
        if (p.bpm < lo || p.bpm > hi) continue;
        if (best == nullptr || better(p, *best)) best = &p;
      }
    }

    if (best != nullptr) {
      step.bpm = best->bpm;
      step.branch = TrackerBranch::kSelect;
      state.delta_h = config.delta_h_init;
      state.consecutive_holds = 0;
    } else if (state.consecutive_holds < config.max_consecutive_holds) {
      step.bpm = previous;
      step.branch = TrackerBranch::kHold;
      state.consecutive_holds += 1;
      state.delta_h += config.hold_increment;
    } else {
      const std::size_t m =
          std::min(static_cast<std::size_t>(config.regression_points), state.history.size());
      const std::span<const double> tail(state.history.data() + state.history.size() - m, m);
      const double first_index = static_cast<double>(state.window_index - m);
      const double extrapolated =
          detail::extrapolate_linear(tail, first_index, static_cast<double>(state.window_index));
      step.bpm = previous + config.prediction_step * detail::signum(extrapolated - previous);
      step.branch = TrackerBranch::kPredict;
      state.delta_h += config.post_prediction_increment;
      if (config.reset_holds_after_prediction) state.consecutive_holds = 0;
    }
  }

  state.history.push_back(step.bpm);
  state.window_index += 1;
  return step;
}

// Inputs the tracker needs for one window.
struct WindowObservation {
  Spectrum spectrum_ch1;
  std::vector<Peak> peaks_ch1;
  std::vector<Peak> peaks_ch2;
};

inline std::vector<TrackStep> run_tracker_steps(std::span<const WindowObservation> stream,
                                                const TrackerConfig& config) {
  require(!stream.empty(), ErrorKind::kInvalidArgument, "tracker input stream is empty");
  TrackerState state = make_tracker_state(config);
  std::vector<TrackStep> steps;
  steps.reserve(stream.size());
  for (const auto& w : stream) {
    steps.push_back(track_window(w.spectrum_ch1, w.peaks_ch1, w.peaks_ch2, state, config));
  }
  return steps;
}

inline std::vector<double> run_tracker(std::span<const WindowObservation> stream,
                                       const TrackerConfig& config) {
  std::vector<double> bpm;
  for (const auto& s : run_tracker_steps(stream, config)) bpm.push_back(s.bpm);
  return bpm;
}

}  // namespace heartbeat
