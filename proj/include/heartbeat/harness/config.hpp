#pragma once

#include <charconv>
#include <cstddef>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <string_view>

#include "heartbeat/bandpass.hpp"
#include "heartbeat/error.hpp"
#include "heartbeat/metrics.hpp"
#include "heartbeat/rls.hpp"
#include "heartbeat/signal_core.hpp"
#include "heartbeat/spectrum.hpp"
#include "heartbeat/tracker.hpp"

namespace heartbeat {

struct PeakOptions {
  std::size_t max_peaks = 6;
  double min_prominence_ratio = 0.3;
};

struct PipelineConfig {
  WindowPlan window;
  Band band;
  BandpassDesign bandpass;
  SpectrumOptions spectrum;
  PeakOptions peaks;
  bool rls_enabled = true;
  RlsConfig rls;
  TrackerConfig tracker;
  AggregateMode aggregate = AggregateMode::kPooled;
  KendallVariant kendall = KendallVariant::kTauA;

  // Sample-rate-dependent checks happen when a recording is bound.
  void validate() const {
    try {
      require(window.hop_seconds > 0.0 && window.hop_seconds <= window.window_seconds,
              ErrorKind::kInvalidArgument, "window.hop_seconds must lie in (0, window.seconds]");
      require(band.low_hz > 0.0 && band.low_hz < band.high_hz, ErrorKind::kInvalidArgument,
              "band requires 0 < band.low_hz < band.high_hz");
      require(bandpass.order >= 2 && bandpass.order % 2 == 0, ErrorKind::kInvalidArgument,
              "bandpass.order must be even and >= 2");
      require(spectrum.grid_step_bpm > 0.0, ErrorKind::kInvalidArgument,
              "spectrum.grid_step_bpm must be positive");
      require(peaks.max_peaks >= 1, ErrorKind::kInvalidArgument, "spectrum.max_peaks must be >= 1");
      require(peaks.min_prominence_ratio >= 0.0 && peaks.min_prominence_ratio <= 1.0,
              ErrorKind::kInvalidArgument, "spectrum.min_prominence_ratio must lie in [0, 1]");
      rls.validate();
      tracker.validate();
    } catch (const Error& e) {
      fail(ErrorKind::kConfig, e.what());
    }
  }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

inline bool parse_double(std::string_view text, double& out) {
  text = trim(text);
  if (text.empty()) return false;
  if (text.front() == '+') text.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

inline std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace detail

// Applies one `module.key=value` setting.
inline void apply_setting(PipelineConfig& cfg, std::string_view key, std::string_view raw) {
  const std::string value(detail::trim(raw));
  auto bad = [&](std::string_view why) {
    fail(ErrorKind::kConfig, "key '" + std::string(key) + "': " + std::string(why) + " ('" + value + "')");
  };
  auto number = [&]() {
    double v = 0.0;
    if (!detail::parse_double(value, v)) bad("expected a number");
    return v;
  };
  auto integer = [&]() {
    const double v = number();
    if (v != std::floor(v)) bad("expected an integer");
    return static_cast<int>(v);
  };
  auto boolean = [&]() {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    bad("expected true or false");
    return false;
  };

  using Setter = std::function<void()>;
  const std::map<std::string_view, Setter> setters = {
      {"window.seconds", [&] { cfg.window.window_seconds = number(); }},
      {"window.hop_seconds", [&] { cfg.window.hop_seconds = number(); }},
      {"band.low_hz", [&] { cfg.band.low_hz = number(); }},
      {"band.high_hz", [&] { cfg.band.high_hz = number(); }},
      {"bandpass.order", [&] { cfg.bandpass.order = integer(); }},
      {"bandpass.zero_phase", [&] { cfg.bandpass.zero_phase = boolean(); }},
      {"spectrum.grid_step_bpm", [&] { cfg.spectrum.grid_step_bpm = number(); }},
      {"spectrum.taper",
       [&] {
         if (value == "rectangular") cfg.spectrum.taper = Taper::kRectangular;
         else if (value == "hann") cfg.spectrum.taper = Taper::kHann;
         else bad("expected rectangular or hann");
       }},
      {"spectrum.max_peaks",
       [&] {
         const int v = integer();
         if (v < 1) bad("must be >= 1");
         cfg.peaks.max_peaks = static_cast<std::size_t>(v);
       }},
      {"spectrum.min_prominence_ratio", [&] { cfg.peaks.min_prominence_ratio = number(); }},
      {"rls.enabled", [&] { cfg.rls_enabled = boolean(); }},
      {"rls.order", [&] { cfg.rls.order = integer(); }},
      {"rls.forgetting", [&] { cfg.rls.forgetting = number(); }},
      {"rls.init_delta", [&] { cfg.rls.init_delta = number(); }},
      {"tracker.delta_h_init", [&] { cfg.tracker.delta_h_init = number(); }},
      {"tracker.hold_increment", [&] { cfg.tracker.hold_increment = number(); }},
      {"tracker.max_consecutive_holds", [&] { cfg.tracker.max_consecutive_holds = integer(); }},
      {"tracker.prediction_step", [&] { cfg.tracker.prediction_step = number(); }},
      {"tracker.post_prediction_increment",
       [&] { cfg.tracker.post_prediction_increment = number(); }},
      {"tracker.regression_points", [&] { cfg.tracker.regression_points = integer(); }},
      {"tracker.bootstrap_windows", [&] { cfg.tracker.bootstrap_windows = integer(); }},
      {"tracker.reset_holds_after_prediction",
       [&] { cfg.tracker.reset_holds_after_prediction = boolean(); }},
      {"metrics.aggregate",
       [&] {
         if (value == "pooled") cfg.aggregate = AggregateMode::kPooled;
         else if (value == "mean") cfg.aggregate = AggregateMode::kMean;
         else bad("expected pooled or mean");
       }},
      {"metrics.kendall",
       [&] {
         if (value == "tau_a") cfg.kendall = KendallVariant::kTauA;
         else if (value == "tau_b") cfg.kendall = KendallVariant::kTauB;
         else bad("expected tau_a or tau_b");
       }},
  };
  const auto it = setters.find(key);
  if (it == setters.end()) fail(ErrorKind::kConfig, "unknown key '" + std::string(key) + "'");
  it->second();
}

// Flat `key=value` text; '#' starts a comment. Unknown keys are errors.
inline PipelineConfig parse_config(std::string_view text, PipelineConfig cfg = {}) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view body = line;
    if (const auto hash = body.find('#'); hash != std::string_view::npos) body = body.substr(0, hash);
    body = detail::trim(body);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      fail(ErrorKind::kConfig, "line " + std::to_string(line_no) + ": expected key=value");
    }
    apply_setting(cfg, detail::trim(body.substr(0, eq)), body.substr(eq + 1));
  }
  cfg.validate();
  return cfg;
}

inline PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kConfig, "cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

inline std::string to_config_text(const PipelineConfig& c) {
  using detail::format_double;
  std::ostringstream o;
  auto yes = [](bool b) { return b ? "true" : "false"; };
  o << "window.seconds=" << format_double(c.window.window_seconds) << '\n'
    << "window.hop_seconds=" << format_double(c.window.hop_seconds) << '\n'
    << "band.low_hz=" << format_double(c.band.low_hz) << '\n'
    << "band.high_hz=" << format_double(c.band.high_hz) << '\n'
    << "bandpass.order=" << c.bandpass.order << '\n'
    << "bandpass.zero_phase=" << yes(c.bandpass.zero_phase) << '\n'
    << "spectrum.grid_step_bpm=" << format_double(c.spectrum.grid_step_bpm) << '\n'
    << "spectrum.taper=" << (c.spectrum.taper == Taper::kHann ? "hann" : "rectangular") << '\n'
    << "spectrum.max_peaks=" << c.peaks.max_peaks << '\n'
    << "spectrum.min_prominence_ratio=" << format_double(c.peaks.min_prominence_ratio) << '\n'
    << "rls.enabled=" << yes(c.rls_enabled) << '\n'
    << "rls.order=" << c.rls.order << '\n'
    << "rls.forgetting=" << format_double(c.rls.forgetting) << '\n'
    << "rls.init_delta=" << format_double(c.rls.init_delta) << '\n'
    << "tracker.delta_h_init=" << format_double(c.tracker.delta_h_init) << '\n'
    << "tracker.hold_increment=" << format_double(c.tracker.hold_increment) << '\n'
    << "tracker.max_consecutive_holds=" << c.tracker.max_consecutive_holds << '\n'
    << "tracker.prediction_step=" << format_double(c.tracker.prediction_step) << '\n'
    << "tracker.post_prediction_increment=" << format_double(c.tracker.post_prediction_increment)
    << '\n'
    << "tracker.regression_points=" << c.tracker.regression_points << '\n'
    << "tracker.bootstrap_windows=" << c.tracker.bootstrap_windows << '\n'
    << "tracker.reset_holds_after_prediction=" << yes(c.tracker.reset_holds_after_prediction)
    << '\n'
    << "metrics.aggregate=" << to_string(c.aggregate) << '\n'
    << "metrics.kendall=" << (c.kendall == KendallVariant::kTauB ? "tau_b" : "tau_a") << '\n';
  return o.str();
}

}  // namespace heartbeat
