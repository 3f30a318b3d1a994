#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "heartbeat/error.hpp"
#include "heartbeat/signal_core.hpp"

namespace heartbeat {

inline double hz_to_bpm(double hz) { return 60.0 * hz; }
inline double bpm_to_hz(double bpm) { return bpm / 60.0; }

enum class Taper { kRectangular, kHann };

struct SpectrumOptions {
  double grid_step_bpm = 0.2;
  Taper taper = Taper::kRectangular;
};

struct Spectrum {
  std::vector<double> freqs_hz;
  std::vector<double> power;
  double grid_step_bpm = 0.0;

  std::size_t size() const { return power.size(); }
  bool empty() const { return power.empty(); }

  std::size_t argmax() const {
    require(!power.empty(), ErrorKind::kInvalidArgument, "argmax of an empty spectrum");
    return static_cast<std::size_t>(std::max_element(power.begin(), power.end()) - power.begin());
  }
  double argmax_bpm() const { return hz_to_bpm(freqs_hz[argmax()]); }
};

struct Peak {
  double freq_hz = 0.0;
  double bpm = 0.0;
  double magnitude = 0.0;
};

// Uniform grid from band.low_hz to band.high_hz (both included when the step
// divides the band) with spacing step_bpm / 60 Hz.
inline std::vector<double> make_grid(const Band& band, double step_bpm) {
  require(step_bpm > 0.0 && std::isfinite(step_bpm), ErrorKind::kInvalidArgument,
          "grid step must be positive");
  require(band.low_hz > 0.0 && band.low_hz < band.high_hz, ErrorKind::kInvalidArgument,
          "grid band requires 0 < low < high");
  const double step = bpm_to_hz(step_bpm);
  const auto count =
      static_cast<std::size_t>(std::floor((band.high_hz - band.low_hz) / step + 1e-9)) + 1;
  std::vector<double> grid(count);
  for (std::size_t i = 0; i < count; ++i) grid[i] = band.low_hz + static_cast<double>(i) * step;
  return grid;
}

// S(f) = (fs/N) |sum_k x_k exp(-j 2 pi k f / fs)|^2 on an arbitrary grid.
// The exponent uses f/fs (cycles per sample), so grid frequencies are in Hz.
// The window mean is removed first; the optional taper is applied after.
inline Spectrum periodogram(std::span<const double> window, double sample_rate,
                            std::span<const double> freqs_hz, Taper taper = Taper::kRectangular) {
  require(!window.empty(), ErrorKind::kInvalidArgument, "periodogram of an empty window");
  require(sample_rate > 0.0, ErrorKind::kInvalidSampleRate, "sample rate must be positive");
  const std::size_t n = window.size();
  for (double f : freqs_hz) {
    require(f > 0.0 && f < sample_rate / 2.0, ErrorKind::kInvalidArgument,
            "grid frequency " + std::to_string(f) + " Hz outside (0, Nyquist)");
  }
  for (double v : window) {
    require(std::isfinite(v), ErrorKind::kNonFiniteSample, "non-finite sample in window");
  }

  const double mean = std::accumulate(window.begin(), window.end(), 0.0) / static_cast<double>(n);
  std::vector<double> x(n);
  for (std::size_t k = 0; k < n; ++k) x[k] = window[k] - mean;
  if (taper == Taper::kHann && n > 1) {
    for (std::size_t k = 0; k < n; ++k) {
      x[k] *= 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(k) /
                                   static_cast<double>(n - 1));
    }
  }

  Spectrum out;
  out.freqs_hz.assign(freqs_hz.begin(), freqs_hz.end());
  out.power.resize(freqs_hz.size());
  if (freqs_hz.size() > 1) out.grid_step_bpm = hz_to_bpm(freqs_hz[1] - freqs_hz[0]);
  const double scale = sample_rate / static_cast<double>(n);
  // Goertzel recurrence; |X(f)| does not depend on where k starts.
  for (std::size_t i = 0; i < freqs_hz.size(); ++i) {
    const double omega = 2.0 * std::numbers::pi * freqs_hz[i] / sample_rate;
    const double coeff = 2.0 * std::cos(omega);
    double s1 = 0.0, s2 = 0.0;
    for (double v : x) {
      const double s0 = v + coeff * s1 - s2;
      s2 = s1;
      s1 = s0;
    }
    const double mag2 = s1 * s1 + s2 * s2 - coeff * s1 * s2;
    out.power[i] = scale * std::max(mag2, 0.0);
  }
  return out;
}

inline Spectrum periodogram(std::span<const double> window, double sample_rate, const Band& band,
                            const SpectrumOptions& options = {}) {
  const std::vector<double> grid = make_grid(band, options.grid_step_bpm);
  Spectrum s = periodogram(window, sample_rate, grid, options.taper);
  s.grid_step_bpm = options.grid_step_bpm;
  return s;
}

// Spacing of a length-N FFT in Hz.
inline double fft_bin_spacing_hz(std::size_t window_samples, double sample_rate) {
  require(window_samples > 0, ErrorKind::kInvalidArgument, "window_samples must be positive");
  return sample_rate / static_cast<double>(window_samples);
}

// Number of length-N FFT bins k*fs/N inside the closed band. At N = 1000,
// fs = 125 Hz the default band holds only 27 bins, 7.5 beats/min apart.
inline std::size_t in_band_fft_bin_count(std::size_t window_samples, double sample_rate,
                                         const Band& band) {
  const double spacing = fft_bin_spacing_hz(window_samples, sample_rate);
  const double eps = 1e-9;
  const double first = std::ceil(band.low_hz / spacing - eps);
  const double last = std::floor(band.high_hz / spacing + eps);
  return last >= first ? static_cast<std::size_t>(last - first) + 1 : 0;
}

// Interior strict local maxima with magnitude >= ratio * global maximum,
// largest first (equal magnitudes keep ascending frequency), at most max_peaks.
inline std::vector<Peak> find_peaks(const Spectrum& spectrum, std::size_t max_peaks = 6,
                                    double min_prominence_ratio = 0.3) {
  std::vector<Peak> peaks;
  const auto& p = spectrum.power;
  if (p.size() < 3) return peaks;
  const double global = *std::max_element(p.begin(), p.end());
  const double threshold = min_prominence_ratio * global;
  for (std::size_t i = 1; i + 1 < p.size(); ++i) {
    if (p[i] > p[i - 1] && p[i] > p[i + 1] && p[i] >= threshold) {
      peaks.push_back({spectrum.freqs_hz[i], hz_to_bpm(spectrum.freqs_hz[i]), p[i]});
    }
  }
  std::stable_sort(peaks.begin(), peaks.end(),
                   [](const Peak& a, const Peak& b) { return a.magnitude > b.magnitude; });
  if (peaks.size() > max_peaks) peaks.resize(max_peaks);
  return peaks;
}

}  // namespace heartbeat
