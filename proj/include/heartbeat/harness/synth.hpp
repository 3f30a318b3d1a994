#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "heartbeat/error.hpp"
#include "heartbeat/signal_core.hpp"

namespace heartbeat {

enum class SynthPreset { kTone, kArtifact, kChirp };

inline SynthPreset parse_preset(std::string_view name) {
  if (name == "tone") return SynthPreset::kTone;
  if (name == "artifact") return SynthPreset::kArtifact;
  if (name == "chirp") return SynthPreset::kChirp;
  fail(ErrorKind::kInvalidArgument, "unknown synth preset '" + std::string(name) + "'");
}

struct SynthOptions {
  double sample_rate = kCanonicalSampleRate;
  // Zero picks the preset default: 60 s for tone/artifact, 300 s for chirp.
  double duration_seconds = 0.0;
  std::uint64_t seed = 1;
  WindowPlan plan;
};

// Fixture recordings with exact ground truth (window-averaged instantaneous
// heart rate).
//   tone      72 bpm on both PPG channels, no acceleration, no noise.
//   artifact  tone plus a stronger 120 bpm motion component that is an FIR
//             image of accel_y; accel_x/z carry weak independent noise.
//   chirp     heart rate 70 -> 150 -> 70 bpm (triangle), second harmonic,
//             three accelerometer tones at 0.9, 2.9 and 3.6 Hz leaking into
//             both PPG channels through short random FIRs strongly enough to
//             dominate the raw spectrum, and white noise at 5 dB SNR
//             relative to the pulse component.
inline Recording synthesize(SynthPreset preset, const SynthOptions& opt = {}) {
  require(opt.sample_rate > 0.0, ErrorKind::kInvalidSampleRate, "sample rate must be positive");
  const double fs = opt.sample_rate;
  double duration = opt.duration_seconds;
  if (duration <= 0.0) duration = preset == SynthPreset::kChirp ? 300.0 : 60.0;
  const auto n = static_cast<std::size_t>(std::llround(duration * fs));
  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double two_pi = 2.0 * std::numbers::pi;

  Recording rec;
  rec.sample_rate = fs;
  for (auto& c : rec.ppg) c.assign(n, 0.0);
  for (auto& c : rec.accel) c.assign(n, 0.0);

  std::function<double(double)> heart_rate = [](double) { return 72.0; };
  double harmonic = 0.0;
  double snr_db = std::numeric_limits<double>::infinity();
  if (preset == SynthPreset::kChirp) {
    heart_rate = [duration](double t) {
      const double half = duration / 2.0;
      const double u = t < half ? t / half : (duration - t) / half;
      return 70.0 + 80.0 * u;
    };
    harmonic = 0.4;
    snr_db = 5.0;
  }

  // Pulse component; channel 2 is slightly weaker and phase shifted.
  const std::array<double, 2> amp = {1.0, 0.8};
  const std::array<double, 2> shift = {0.0, 0.6};
  std::vector<double> hr(n);
  double phase = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / fs;
    hr[i] = heart_rate(t);
    for (int c = 0; c < 2; ++c) {
      rec.ppg[c][i] = amp[c] * (std::sin(phase + shift[c]) + harmonic * std::sin(2.0 * phase + 2.0 * shift[c] + 0.3));
    }
    phase += two_pi * hr[i] / 60.0 / fs;
  }
  if (std::isfinite(snr_db)) {
    for (int c = 0; c < 2; ++c) {
      const double signal_power = amp[c] * amp[c] * (1.0 + harmonic * harmonic) / 2.0;
      const double sigma = std::sqrt(signal_power / std::pow(10.0, snr_db / 10.0));
      for (double& v : rec.ppg[c]) v += sigma * gauss(rng);
    }
  }

  auto leak = [&](const Signal& accel, const std::vector<double>& taps, double gain, int c) {
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t k = 0; k < taps.size() && k <= i; ++k) acc += taps[k] * accel[i - k];
      rec.ppg[c][i] += gain * acc;
    }
  };
  auto random_taps = [&](std::size_t count) {
    std::vector<double> h(count);
    double norm = 0.0;
    for (double& v : h) v = gauss(rng), norm += v * v;
    for (double& v : h) v /= std::sqrt(norm);
    return h;
  };

  if (preset == SynthPreset::kArtifact) {
    const double f = 2.0;  // 120 bpm
    const double p0 = two_pi * unit(rng);
    for (std::size_t i = 0; i < n; ++i) {
      const double t = static_cast<double>(i) / fs;
      rec.accel[1][i] = std::sin(two_pi * f * t + p0) + 0.05 * gauss(rng);
      rec.accel[0][i] = 0.05 * gauss(rng);
      rec.accel[2][i] = 0.05 * gauss(rng);
    }
    for (int c = 0; c < 2; ++c) leak(rec.accel[1], random_taps(4), 3.0, c);
  } else if (preset == SynthPreset::kChirp) {
    const std::array<double, 3> freq = {2.9, 0.9, 3.6};
    const std::array<double, 3> gain = {3.0, 2.4, 2.0};
    for (int a = 0; a < 3; ++a) {
      double p = two_pi * unit(rng);
      for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / fs;
        rec.accel[a][i] = std::sin(p) + 0.1 * gauss(rng);
        // Slow cadence wobble keeps the artifact non-stationary.
        p += two_pi * (freq[a] + 0.05 * std::sin(two_pi * t / 40.0 + a)) / fs;
      }
      for (int c = 0; c < 2; ++c) leak(rec.accel[a], random_taps(4), gain[a], c);
    }
  }

  const std::size_t windows = opt.plan.window_count(n, fs);
  const std::size_t wn = opt.plan.window_samples(fs), hop = opt.plan.hop_samples(fs);
  std::vector<double> truth(windows);
  for (std::size_t k = 0; k < windows; ++k) {
    double s = 0.0;
    for (std::size_t i = k * hop; i < k * hop + wn; ++i) s += hr[i];
    truth[k] = s / static_cast<double>(wn);
  }
  rec.truth_bpm = std::move(truth);
  static constexpr std::array<std::string_view, 3> names = {"tone", "artifact", "chirp"};
  rec.id = "synth_" + std::string(names[static_cast<int>(preset)]);
  return rec;
}

}  // namespace heartbeat
