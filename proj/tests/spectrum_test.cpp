#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "heartbeat/spectrum.hpp"
#include "oracles.hpp"

namespace heartbeat {
namespace {

constexpr double kFs = 125.0;

std::vector<double> two_tone(std::size_t n = 1000) {
  auto x = oracle::tone(n, kFs, 1.2, 1.0, 0.1);
  const auto y = oracle::tone(n, kFs, 2.4, 0.5, 0.7);
  for (std::size_t i = 0; i < n; ++i) x[i] += y[i];
  return x;
}

TEST(Periodogram, ZeroWindowIsZero) {
  const std::vector<double> x(1000, 0.0);
  const Spectrum s = periodogram(x, kFs, Band{});
  for (double p : s.power) EXPECT_EQ(p, 0.0);
}

TEST(Periodogram, GridCoversBand) {
  const Spectrum s = periodogram(oracle::tone(1000, kFs, 1.2), kFs, Band{});
  ASSERT_EQ(s.size(), 1001u);  // 40..240 bpm every 0.2
  EXPECT_NEAR(hz_to_bpm(s.freqs_hz.front()), 40.0, 1e-9);
  EXPECT_NEAR(hz_to_bpm(s.freqs_hz.back()), 240.0, 1e-9);
  EXPECT_DOUBLE_EQ(s.grid_step_bpm, 0.2);
  for (std::size_t i = 1; i < s.size(); ++i) {
    ASSERT_NEAR(s.freqs_hz[i] - s.freqs_hz[i - 1], 0.2 / 60.0, 1e-12);
  }
}

TEST(Periodogram, MatchesDirectEvaluation) {
  std::mt19937_64 rng(5);
  const auto x = oracle::white_noise(1000, rng);
  const Spectrum s = periodogram(x, kFs, Band{});
  for (std::size_t i = 0; i < s.size(); i += 37) {
    const double ref = oracle::periodogram_at(x, kFs, s.freqs_hz[i]);
    ASSERT_NEAR(s.power[i], ref, 1e-8 * ref) << i;
  }
}

TEST(Periodogram, SingleToneLocalizedAt72Bpm) {
  const auto x = oracle::tone(1000, kFs, 1.2);
  const Spectrum s = periodogram(x, kFs, Band{});
  EXPECT_NEAR(s.argmax_bpm(), 72.0, 0.2);
  // Brute-force argmax over the same grid.
  std::size_t best = 0;
  double best_p = -1;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double p = oracle::periodogram_at(x, kFs, s.freqs_hz[i]);
    if (p > best_p) best_p = p, best = i;
  }
  EXPECT_EQ(s.argmax(), best);
}

TEST(Periodogram, TwoTonesPowerRatioAboutFour) {
  const auto x = two_tone();
  const Spectrum s = periodogram(x, kFs, Band{});
  const auto peaks = find_peaks(s, 6, 0.1);
  ASSERT_EQ(peaks.size(), 2u);
  EXPECT_NEAR(peaks[0].bpm, 72.0, 0.4);
  EXPECT_NEAR(peaks[1].bpm, 144.0, 0.4);
  const double ratio = peaks[0].magnitude / peaks[1].magnitude;
  const double ref = oracle::periodogram_at(x, kFs, peaks[0].freq_hz) /
                     oracle::periodogram_at(x, kFs, peaks[1].freq_hz);
  EXPECT_NEAR(ratio, ref, 1e-6 * ref);
  EXPECT_NEAR(ratio, 4.0, 0.4);
}

TEST(Periodogram, EqualsScaledFftAtBinFrequencies) {
  std::mt19937_64 rng(9);
  const auto x = oracle::white_noise(1000, rng);
  std::vector<double> bins;
  for (std::size_t m = 1; m < 500; m += 7) bins.push_back(static_cast<double>(m) * kFs / 1000.0);
  const Spectrum s = periodogram(x, kFs, bins);
  for (std::size_t i = 0; i < bins.size(); ++i) {
    const std::size_t m = 1 + 7 * i;
    const double ref = std::norm(oracle::dft_bin(x, m)) * kFs / 1000.0;
    ASSERT_NEAR(s.power[i], ref, 1e-6 * ref) << "bin " << m;
  }
}

TEST(Periodogram, ParsevalEnergyScaling) {
  std::mt19937_64 rng(21);
  const std::size_t n = 1000;
  for (int trial = 0; trial < 5; ++trial) {
    const auto x = oracle::white_noise(n, rng, 1.0 + trial);
    // Energy of the mean-removed window from a direct DFT.
    double dft_energy = 0.0;
    for (std::size_t m = 0; m < n; ++m) dft_energy += std::norm(oracle::dft_bin(x, m));
    const double mean0 = std::norm(oracle::dft_bin(x, 0));
    const double energy = (dft_energy - mean0) / static_cast<double>(n);
    // Dense grid over (0, fs/2): step fs / (8N).
    std::vector<double> grid;
    const double step = kFs / (8.0 * static_cast<double>(n));
    for (double f = step; f < kFs / 2.0; f += step) grid.push_back(f);
    const Spectrum s = periodogram(x, kFs, grid);
    double integral = 0.0;
    for (double p : s.power) integral += p * step;
    // integral over (0, fs/2) of (fs/N)|X|^2 = (fs/N) * fs * energy / 2
    const double expected = kFs / static_cast<double>(n) * kFs * energy / 2.0;
    EXPECT_NEAR(integral / expected, 1.0, 0.05);
  }
}

TEST(Periodogram, GridRefinementKeepsArgmax) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> f(0.8, 3.8), a(0.2, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    auto x = oracle::tone(1000, kFs, f(rng), 1.0);
    const auto y = oracle::tone(1000, kFs, f(rng), a(rng), 1.0);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += y[i];
    const double coarse = periodogram(x, kFs, Band{}, {0.4}).argmax_bpm();
    const double fine = periodogram(x, kFs, Band{}, {0.2}).argmax_bpm();
    EXPECT_LE(std::abs(coarse - fine), 0.4 + 1e-9) << trial;
  }
}

TEST(Periodogram, Errors) {
  const std::vector<double> empty;
  EXPECT_THROW(periodogram(empty, kFs, Band{}), Error);
  const auto x = oracle::tone(100, kFs, 1.0);
  const std::vector<double> nyquist = {1.0, 62.5};
  EXPECT_THROW(periodogram(x, kFs, nyquist), Error);
  const std::vector<double> zero = {0.0};
  EXPECT_THROW(periodogram(x, kFs, zero), Error);
}

TEST(Periodogram, HannTaperStillFindsTone) {
  const auto x = oracle::tone(1000, kFs, 1.43);
  const Spectrum s = periodogram(x, kFs, Band{}, {0.2, Taper::kHann});
  EXPECT_NEAR(s.argmax_bpm(), 1.43 * 60.0, 0.3);
}

TEST(FftBins, ResolutionArithmetic) {
  EXPECT_EQ(in_band_fft_bin_count(1000, 125.0, Band{}), 27u);
  EXPECT_DOUBLE_EQ(fft_bin_spacing_hz(1000, 125.0), 0.125);
  EXPECT_DOUBLE_EQ(hz_to_bpm(fft_bin_spacing_hz(1000, 125.0)), 7.5);
  // Bins at 1, 2, 3, 4 Hz.
  EXPECT_EQ(in_band_fft_bin_count(125, 125.0, Band{}), 4u);
}

TEST(FftBins, MatchesEnumeration) {
  for (std::size_t n : {100u, 125u, 250u, 512u, 1000u, 1024u, 2000u}) {
    std::size_t count = 0;
    const double spacing = 125.0 / static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k) {
      const double f = static_cast<double>(k) * spacing;
      if (f >= 2.0 / 3.0 - 1e-12 && f <= 4.0 + 1e-12) ++count;
    }
    EXPECT_EQ(in_band_fft_bin_count(n, 125.0, Band{}), count) << n;
  }
}

TEST(FindPeaks, MonotoneHasNoPeaks) {
  Spectrum s;
  for (int i = 0; i < 50; ++i) {
    s.freqs_hz.push_back(1.0 + 0.01 * i);
    s.power.push_back(i);
  }
  EXPECT_TRUE(find_peaks(s).empty());
}

TEST(FindPeaks, SingleTone) {
  const Spectrum s = periodogram(oracle::tone(1000, kFs, 1.2), kFs, Band{});
  const auto peaks = find_peaks(s);
  ASSERT_EQ(peaks.size(), 1u);
  EXPECT_NEAR(peaks[0].bpm, 72.0, 0.2);
  EXPECT_EQ(peaks[0].bpm, s.argmax_bpm());
}

TEST(FindPeaks, TiesKeepAscendingFrequency) {
  Spectrum s;
  s.freqs_hz = {1.0, 1.1, 1.2, 1.3, 1.4, 1.5, 1.6};
  s.power = {0.0, 2.0, 0.0, 1.0, 0.0, 2.0, 0.0};
  const auto peaks = find_peaks(s, 6, 0.0);
  ASSERT_EQ(peaks.size(), 3u);
  EXPECT_DOUBLE_EQ(peaks[0].freq_hz, 1.1);
  EXPECT_DOUBLE_EQ(peaks[1].freq_hz, 1.5);
  EXPECT_DOUBLE_EQ(peaks[2].freq_hz, 1.3);
  EXPECT_EQ(find_peaks(s, 2, 0.0).size(), 2u);
  EXPECT_EQ(find_peaks(s, 6, 0.6).size(), 2u);
}

TEST(FindPeaks, PlateausAreNotStrictMaxima) {
  Spectrum s;
  s.freqs_hz = {1.0, 1.1, 1.2, 1.3, 1.4};
  s.power = {0.0, 1.0, 1.0, 0.0, 0.0};
  EXPECT_TRUE(find_peaks(s, 6, 0.0).empty());
}

TEST(FindPeaks, PropertiesOnRandomSpectra) {
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 50; ++trial) {
    const auto x = oracle::white_noise(1000, rng);
    const Spectrum s = periodogram(x, kFs, Band{});
    const double ratio = 0.05 * (trial % 10);
    const auto peaks = find_peaks(s, 8, ratio);
    const double global = *std::max_element(s.power.begin(), s.power.end());
    auto freqs = std::vector<double>();
    for (std::size_t i = 0; i < peaks.size(); ++i) {
      EXPECT_GE(peaks[i].magnitude, ratio * global);
      if (i > 0) {
        EXPECT_GE(peaks[i - 1].magnitude, peaks[i].magnitude);
      }
      freqs.push_back(peaks[i].freq_hz);
      const auto it = std::find(s.freqs_hz.begin(), s.freqs_hz.end(), peaks[i].freq_hz);
      ASSERT_NE(it, s.freqs_hz.end());
      const auto j = static_cast<std::size_t>(it - s.freqs_hz.begin());
      EXPECT_GT(s.power[j], s.power[j - 1]);
      EXPECT_GT(s.power[j], s.power[j + 1]);
    }
    std::sort(freqs.begin(), freqs.end());
    EXPECT_TRUE(std::adjacent_find(freqs.begin(), freqs.end()) == freqs.end());
  }
}

}  // namespace
}  // namespace heartbeat
