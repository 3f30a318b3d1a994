#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "heartbeat/error.hpp"

namespace heartbeat {

using Signal = std::vector<double>;

inline constexpr double kCanonicalSampleRate = 125.0;

// Analysis band in Hz. The default 2/3..4 Hz is 40..240 beats/min.
struct Band {
  double low_hz = 2.0 / 3.0;
  double high_hz = 4.0;

  double low_bpm() const { return 60.0 * low_hz; }
  double high_bpm() const { return 60.0 * high_hz; }

  void validate(double sample_rate) const {
    require(low_hz > 0.0 && low_hz < high_hz, ErrorKind::kInvalidArgument,
            "band requires 0 < low_hz < high_hz");
    require(high_hz < sample_rate / 2.0, ErrorKind::kInvalidArgument,
            "band high edge " + std::to_string(high_hz) + " Hz is not below Nyquist " +
                std::to_string(sample_rate / 2.0) + " Hz");
  }
};

// Sliding analysis windows. Defaults are 8 s windows every 2 s (6 s overlap).
struct WindowPlan {
  double window_seconds = 8.0;
  double hop_seconds = 2.0;

  std::size_t window_samples(double sample_rate) const {
    return static_cast<std::size_t>(std::llround(window_seconds * sample_rate));
  }
  std::size_t hop_samples(double sample_rate) const {
    return static_cast<std::size_t>(std::llround(hop_seconds * sample_rate));
  }

  void validate(double sample_rate) const {
    require(sample_rate > 0.0, ErrorKind::kInvalidSampleRate, "sample rate must be positive");
    require(hop_seconds > 0.0 && hop_seconds <= window_seconds, ErrorKind::kInvalidArgument,
            "window plan requires 0 < hop_seconds <= window_seconds");
    require(hop_samples(sample_rate) >= 1, ErrorKind::kInvalidArgument,
            "hop is shorter than one sample");
  }

  // Number of full windows in a signal of `length` samples; trailing samples
  // that cannot fill a window are dropped. Zero when the signal is too short.
  std::size_t window_count(std::size_t length, double sample_rate) const {
    const std::size_t n = window_samples(sample_rate);
    if (length < n || n == 0) return 0;
    return (length - n) / hop_samples(sample_rate) + 1;
  }

  // Centre of window k in seconds from the start of the recording.
  double window_center_seconds(std::size_t k, double sample_rate) const {
    return (static_cast<double>(k * hop_samples(sample_rate)) +
            static_cast<double>(window_samples(sample_rate)) / 2.0) /
           sample_rate;
  }
};

// Synchronized two-channel PPG plus tri-axis acceleration.
struct Recording {
  std::string id;
  double sample_rate = kCanonicalSampleRate;
  Signal ppg[2];
  Signal accel[3];
  std::optional<std::vector<double>> truth_bpm;
  // Free-form annotation carried into reports (e.g. known arrhythmia).
  std::string note;

  std::size_t length() const { return ppg[0].size(); }

  void validate(const WindowPlan& plan) const {
    require(sample_rate > 0.0 && std::isfinite(sample_rate), ErrorKind::kInvalidSampleRate,
            "recording '" + id + "': sample rate must be positive");
    const std::size_t n = ppg[0].size();
    for (const auto* ch : {&ppg[1], &accel[0], &accel[1], &accel[2]}) {
      require(ch->size() == n, ErrorKind::kChannelLengthMismatch,
              "recording '" + id + "': channels have different lengths");
    }
    plan.validate(sample_rate);
    const std::size_t windows = plan.window_count(n, sample_rate);
    require(windows > 0, ErrorKind::kSignalTooShort,
            "recording '" + id + "' has " + std::to_string(n) + " samples, fewer than one window (" +
                std::to_string(plan.window_samples(sample_rate)) + ")");
    if (truth_bpm) {
      require(truth_bpm->size() == windows, ErrorKind::kTruthLengthMismatch,
              "recording '" + id + "': truth has " + std::to_string(truth_bpm->size()) +
                  " values but the window plan yields " + std::to_string(windows) + " windows");
    }
  }
};

// Window k covers samples [k*hop, k*hop + window). The returned views alias
// `channel`.
inline std::vector<std::span<const double>> segment_windows(std::span<const double> channel,
                                                            const WindowPlan& plan,
                                                            double sample_rate) {
  plan.validate(sample_rate);
  const std::size_t n = plan.window_samples(sample_rate);
  require(channel.size() >= n && n > 0, ErrorKind::kSignalTooShort,
          "channel has " + std::to_string(channel.size()) +
              " samples, fewer than one window of " + std::to_string(n));
  const std::size_t hop = plan.hop_samples(sample_rate);
  const std::size_t count = plan.window_count(channel.size(), sample_rate);
  std::vector<std::span<const double>> windows;
  windows.reserve(count);
  for (std::size_t k = 0; k < count; ++k) windows.push_back(channel.subspan(k * hop, n));
  return windows;
}

}  // namespace heartbeat
