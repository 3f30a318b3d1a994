#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "heartbeat/error.hpp"
#include "heartbeat/signal_core.hpp"

namespace heartbeat {

struct BandpassDesign {
  // Band-pass order (number of poles); must be even. 4 means a second-order
  // low-pass prototype mapped to a band-pass.
  int order = 4;
  // Forward-backward filtering (zero phase, zero group delay). When false the
  // filter runs once, causally, and has the usual Butterworth group delay.
  bool zero_phase = true;
};

// Direct-form II transposed biquad, a0 == 1.
struct Biquad {
  double b0 = 1, b1 = 0, b2 = 0;
  double a1 = 0, a2 = 0;

  std::complex<double> response(double omega) const {
    const std::complex<double> z1 = std::polar(1.0, -omega);
    const std::complex<double> z2 = z1 * z1;
    return (b0 + b1 * z1 + b2 * z2) / (1.0 + a1 * z1 + a2 * z2);
  }
};

// Butterworth band-pass as a cascade of second-order sections.
//
// The band edges are placed at the -3 dB points of the response that is
// actually applied: for zero-phase filtering the squared magnitude counts
// twice, so the analog prototype is widened until |H|^4 = 1/2 at the edges.
class ButterworthBandpass {
 public:
  ButterworthBandpass(double sample_rate, const Band& band, const BandpassDesign& design = {})
      : sample_rate_(sample_rate), design_(design) {
    require(sample_rate > 0.0, ErrorKind::kInvalidSampleRate, "sample rate must be positive");
    band.validate(sample_rate);
    require(design.order >= 2 && design.order % 2 == 0, ErrorKind::kInvalidArgument,
            "band-pass order must be even and >= 2");
    const int n = design.order / 2;
    const double fs2 = 2.0 * sample_rate;
    // Prewarped analog edges.
    const double w1 = fs2 * std::tan(std::numbers::pi * band.low_hz / sample_rate);
    const double w2 = fs2 * std::tan(std::numbers::pi * band.high_hz / sample_rate);
    edge_scale_ = design.zero_phase ? std::pow(std::numbers::sqrt2 - 1.0, 1.0 / (2.0 * n)) : 1.0;
    center_ = std::sqrt(w1 * w2);
    bandwidth_ = (w2 - w1) / edge_scale_;

    std::vector<std::complex<double>> upper;  // digital poles with Im > 0
    std::vector<double> real;
    for (int k = 1; k <= n; ++k) {
      const std::complex<double> p =
          std::polar(1.0, std::numbers::pi * (2.0 * k + n - 1) / (2.0 * n));
      const std::complex<double> pb = p * bandwidth_;
      const std::complex<double> disc = std::sqrt(pb * pb - 4.0 * center_ * center_);
      for (const std::complex<double> s : {(pb + disc) / 2.0, (pb - disc) / 2.0}) {
        const std::complex<double> z = (fs2 + s) / (fs2 - s);
        if (std::abs(z.imag()) <= 1e-12 * std::abs(z)) {
          real.push_back(z.real());
        } else if (z.imag() > 0.0) {
          upper.push_back(z);
        }
      }
    }
    std::sort(upper.begin(), upper.end(),
              [](auto a, auto b) { return std::abs(a) < std::abs(b); });
    std::sort(real.begin(), real.end());
    for (const auto& z : upper) {
      sections_.push_back({1.0, 0.0, -1.0, -2.0 * z.real(), std::norm(z)});
    }
    for (std::size_t i = 0; i + 1 < real.size(); i += 2) {
      sections_.push_back({1.0, 0.0, -1.0, -(real[i] + real[i + 1]), real[i] * real[i + 1]});
    }
    require(static_cast<int>(sections_.size()) == n, ErrorKind::kInvariant,
            "band-pass design produced an unexpected number of sections");

    // Unit gain at the digital image of the analog centre frequency.
    const double omega_c = 2.0 * std::atan(center_ / fs2);
    std::complex<double> h = 1.0;
    for (const auto& s : sections_) h *= s.response(omega_c);
    const double g = 1.0 / std::abs(h);
    sections_.front().b0 *= g;
    sections_.front().b1 *= g;
    sections_.front().b2 *= g;
  }

  const std::vector<Biquad>& sections() const { return sections_; }
  const BandpassDesign& design() const { return design_; }

  // Magnitude of the applied response (squared-in for zero phase) at f Hz.
  double magnitude(double freq_hz) const {
    const double omega = 2.0 * std::numbers::pi * freq_hz / sample_rate_;
    std::complex<double> h = 1.0;
    for (const auto& s : sections_) h *= s.response(omega);
    const double m = std::abs(h);
    return design_.zero_phase ? m * m : m;
  }

  // Group delay in samples of the applied response. Zero for zero-phase
  // filtering; otherwise evaluated numerically at `freq_hz`.
  double group_delay_samples(double freq_hz) const {
    if (design_.zero_phase) return 0.0;
    const double omega = 2.0 * std::numbers::pi * freq_hz / sample_rate_;
    const double d = 1e-6;
    auto phase = [&](double w) {
      std::complex<double> h = 1.0;
      for (const auto& s : sections_) h *= s.response(w);
      return std::arg(h);
    };
    double dphi = phase(omega + d) - phase(omega - d);
    while (dphi > std::numbers::pi) dphi -= 2.0 * std::numbers::pi;
    while (dphi < -std::numbers::pi) dphi += 2.0 * std::numbers::pi;
    return -dphi / (2.0 * d);
  }

  Signal apply(std::span<const double> x) const {
    if (x.empty()) return {};
    if (!design_.zero_phase) return run(x, x.front());
    // Odd extension at both ends, then forward and backward passes with
    // steady-state initial conditions. The pad spans three periods of the
    // lower band edge.
    const std::size_t pad = std::min(
        x.size() - 1, static_cast<std::size_t>(std::ceil(3.0 * sample_rate_ / lowest_edge_hz())));
    Signal ext;
    ext.reserve(x.size() + 2 * pad);
    for (std::size_t i = pad; i >= 1; --i) ext.push_back(2.0 * x.front() - x[i]);
    ext.insert(ext.end(), x.begin(), x.end());
    const std::size_t last = x.size() - 1;
    for (std::size_t i = 1; i <= pad; ++i) ext.push_back(2.0 * x[last] - x[last - i]);

    Signal fwd = run(ext, ext.front());
    std::reverse(fwd.begin(), fwd.end());
    Signal bwd = run(fwd, fwd.front());
    std::reverse(bwd.begin(), bwd.end());
    return Signal(bwd.begin() + static_cast<std::ptrdiff_t>(pad),
                  bwd.begin() + static_cast<std::ptrdiff_t>(pad + x.size()));
  }

 private:
  double lowest_edge_hz() const {
    // Lower -3 dB edge of the analog prototype, mapped back to Hz.
    const double b = bandwidth_ * edge_scale_;
    const double w_low = (-b + std::sqrt(b * b + 4.0 * center_ * center_)) / 2.0;
    return std::atan(w_low / (2.0 * sample_rate_)) * sample_rate_ / std::numbers::pi;
  }

  // Causal cascade, state initialized to the steady state for a constant
  // input equal to `initial`.
  Signal run(std::span<const double> x, double initial) const {
    Signal y(x.begin(), x.end());
    double level = initial;
    for (const auto& s : sections_) {
      const double gain_dc = (s.b0 + s.b1 + s.b2) / (1.0 + s.a1 + s.a2);
      const double out = gain_dc * level;
      double z2 = (s.b2 - s.a2 * gain_dc) * level;
      double z1 = (s.b1 - s.a1 * gain_dc) * level + z2;
      for (double& v : y) {
        const double in = v;
        const double o = s.b0 * in + z1;
        z1 = s.b1 * in - s.a1 * o + z2;
        z2 = s.b2 * in - s.a2 * o;
        v = o;
      }
      level = out;
    }
    return y;
  }

  double sample_rate_;
  BandpassDesign design_;
  double edge_scale_ = 1.0;
  double center_ = 0.0;
  double bandwidth_ = 0.0;
  std::vector<Biquad> sections_;
};

inline Signal bandpass(std::span<const double> channel, double sample_rate, const Band& band,
                       const BandpassDesign& design = {}) {
  return ButterworthBandpass(sample_rate, band, design).apply(channel);
}

}  // namespace heartbeat
