#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "heartbeat/bandpass.hpp"
#include "heartbeat/error.hpp"
#include "heartbeat/harness/config.hpp"
#include "heartbeat/metrics.hpp"
#include "heartbeat/rls.hpp"
#include "heartbeat/signal_core.hpp"
#include "heartbeat/spectrum.hpp"
#include "heartbeat/tracker.hpp"

namespace heartbeat {

enum class Stage { kPre, kPost };

struct RunResult {
  std::string id;
  std::string note;
  double sample_rate = kCanonicalSampleRate;
  std::vector<double> estimates;
  // Window centres in seconds.
  std::vector<double> timestamps;
  std::vector<TrackStep> steps;
  std::optional<std::vector<double>> truth;
  std::optional<MetricsReport> metrics;
  // Band-passed PPG (pre) and motion-cancelled PPG (post), full length.
  Signal prefiltered[2];
  Signal cleaned[2];

  std::size_t window_count() const { return estimates.size(); }
};

// Band-pass every channel, then cancel the acceleration-correlated part of
// each PPG channel with its own x -> y -> z cascade. Filtering runs over the
// continuous stream; windows are cut afterwards.
struct CleanedChannels {
  Signal prefiltered[2];
  Signal cleaned[2];
};

inline CleanedChannels clean_channels(const Recording& rec, const PipelineConfig& cfg) {
  const ButterworthBandpass filter(rec.sample_rate, cfg.band, cfg.bandpass);
  CleanedChannels out;
  Signal accel[3];
  for (int a = 0; a < 3; ++a) accel[a] = filter.apply(rec.accel[a]);
  for (int c = 0; c < 2; ++c) {
    out.prefiltered[c] = filter.apply(rec.ppg[c]);
    if (cfg.rls_enabled) {
      AxisStates states = make_axis_states(cfg.rls);
      out.cleaned[c] = cancel_all_axes(out.prefiltered[c], accel[0], accel[1], accel[2], states);
    } else {
      out.cleaned[c] = out.prefiltered[c];
    }
  }
  return out;
}

inline Spectrum window_spectrum(std::span<const double> channel, std::size_t k, double sample_rate,
                                const PipelineConfig& cfg) {
  const auto windows = segment_windows(channel, cfg.window, sample_rate);
  require(k < windows.size(), ErrorKind::kInvalidArgument,
          "window " + std::to_string(k) + " out of range (" + std::to_string(windows.size()) +
              " windows)");
  return periodogram(windows[k], sample_rate, cfg.band, cfg.spectrum);
}

inline RunResult run_pipeline(const Recording& rec, const PipelineConfig& cfg) {
  try {
    cfg.validate();
    rec.validate(cfg.window);
    cfg.band.validate(rec.sample_rate);

    CleanedChannels ch = clean_channels(rec, cfg);
    const auto w1 = segment_windows(ch.cleaned[0], cfg.window, rec.sample_rate);
    const auto w2 = segment_windows(ch.cleaned[1], cfg.window, rec.sample_rate);
    const std::vector<double> grid = make_grid(cfg.band, cfg.spectrum.grid_step_bpm);

    TrackerState state = make_tracker_state(cfg.tracker);
    RunResult result;
    result.id = rec.id;
    result.note = rec.note;
    result.sample_rate = rec.sample_rate;
    for (std::size_t k = 0; k < w1.size(); ++k) {
      Spectrum s1 = periodogram(w1[k], rec.sample_rate, grid, cfg.spectrum.taper);
      Spectrum s2 = periodogram(w2[k], rec.sample_rate, grid, cfg.spectrum.taper);
      s1.grid_step_bpm = s2.grid_step_bpm = cfg.spectrum.grid_step_bpm;
      const auto p1 = find_peaks(s1, cfg.peaks.max_peaks, cfg.peaks.min_prominence_ratio);
      const auto p2 = find_peaks(s2, cfg.peaks.max_peaks, cfg.peaks.min_prominence_ratio);
      const TrackStep step = track_window(s1, p1, p2, state, cfg.tracker);
      result.steps.push_back(step);
      result.estimates.push_back(step.bpm);
      result.timestamps.push_back(cfg.window.window_center_seconds(k, rec.sample_rate));
    }
    if (rec.truth_bpm) {
      result.truth = rec.truth_bpm;
      result.metrics = lenient_report(result.estimates, *rec.truth_bpm, cfg.kendall);
    }
    for (int c = 0; c < 2; ++c) {
      result.prefiltered[c] = std::move(ch.prefiltered[c]);
      result.cleaned[c] = std::move(ch.cleaned[c]);
    }
    return result;
  } catch (const Error& e) {
    throw Error(e.kind(), "recording '" + rec.id + "': " + e.what());
  }
}

// Runs independent recordings on at most `workers` threads. Results keep the
// input order; the first failure (by input order) is rethrown after all
// workers finish.
inline std::vector<RunResult> run_pipelines(std::span<const Recording> recordings,
                                            const PipelineConfig& cfg, unsigned workers = 0) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(recordings.size(), 1)));
  std::vector<RunResult> results(recordings.size());
  std::vector<std::exception_ptr> errors(recordings.size());
  std::atomic<std::size_t> next{0};
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < workers; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < recordings.size(); i = next++) {
          try {
            results[i] = run_pipeline(recordings[i], cfg);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

}  // namespace heartbeat
