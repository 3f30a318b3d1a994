#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "heartbeat/error.hpp"

namespace heartbeat {

// Estimates h_i against ECG-derived truth G_i, both in beats/min.
struct EstimatePair {
  std::vector<double> estimates;
  std::vector<double> truth;
};

enum class KendallVariant { kTauA, kTauB };
enum class AggregateMode { kPooled, kMean };

inline std::string_view to_string(AggregateMode mode) {
  return mode == AggregateMode::kPooled ? "pooled" : "mean";
}

struct MetricsReport {
  double pearson = 0.0;
  double spearman_rho = 0.0;
  double kendall_tau = 0.0;
  double mae = 0.0;
  std::size_t n = 0;
};

namespace detail {

inline void check_pair(std::span<const double> h, std::span<const double> g, std::size_t min_n) {
  require(h.size() == g.size(), ErrorKind::kLengthMismatch,
          "estimate and truth lengths differ (" + std::to_string(h.size()) + " vs " +
              std::to_string(g.size()) + ")");
  require(h.size() >= min_n, ErrorKind::kInvalidArgument,
          "at least " + std::to_string(min_n) + " values required");
  for (std::size_t i = 0; i < h.size(); ++i) {
    require(std::isfinite(h[i]) && std::isfinite(g[i]), ErrorKind::kNonFiniteSample,
            "non-finite value at index " + std::to_string(i));
  }
}

inline bool has_ties(std::span<const double> x) {
  std::vector<double> s(x.begin(), x.end());
  std::sort(s.begin(), s.end());
  return std::adjacent_find(s.begin(), s.end()) != s.end();
}

inline double clamp_unit(double v) { return std::clamp(v, -1.0, 1.0); }

}  // namespace detail

// 1-based ranks; tied values share the mean of the ranks they span.
inline std::vector<double> midranks(std::span<const double> x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(x.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
    const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

inline double pearson(std::span<const double> h, std::span<const double> g) {
  detail::check_pair(h, g, 2);
  const double n = static_cast<double>(h.size());
  const double mh = std::accumulate(h.begin(), h.end(), 0.0) / n;
  const double mg = std::accumulate(g.begin(), g.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double dh = h[i] - mh;
    const double dg = g[i] - mg;
    sxy += dh * dg;
    sxx += dh * dh;
    syy += dg * dg;
  }
  require(sxx > 0.0 && syy > 0.0, ErrorKind::kUndefinedCorrelation,
          "pearson correlation of a constant sequence");
  return detail::clamp_unit(sxy / std::sqrt(sxx * syy));
}

// 1 - 6 sum d^2 / (n (n^2 - 1)) when neither sequence has ties, otherwise the
// Pearson correlation of mid-ranks (which reduces to the former without ties).
inline double spearman(std::span<const double> h, std::span<const double> g) {
  detail::check_pair(h, g, 2);
  const std::vector<double> rh = midranks(h);
  const std::vector<double> rg = midranks(g);
  if (detail::has_ties(h) || detail::has_ties(g)) return pearson(rh, rg);
  // Ranks are integers here, so the numerator and denominator are exact.
  const double n = static_cast<double>(h.size());
  double d2 = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) d2 += (rh[i] - rg[i]) * (rh[i] - rg[i]);
  const double denom = n * (n * n - 1.0);
  return detail::clamp_unit((denom - 6.0 * d2) / denom);
}

// Tau-a counts tied pairs as neither concordant nor discordant; tau-b also
// corrects the denominator for ties.
inline double kendall(std::span<const double> h, std::span<const double> g,
                      KendallVariant variant = KendallVariant::kTauA) {
  detail::check_pair(h, g, 2);
  std::int64_t concordant = 0, discordant = 0, tied_h = 0, tied_g = 0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    for (std::size_t j = i + 1; j < h.size(); ++j) {
      const double a = h[j] - h[i];
      const double b = g[j] - g[i];
      if (a == 0.0) ++tied_h;
      if (b == 0.0) ++tied_g;
      if (a * b > 0.0) ++concordant;
      else if (a * b < 0.0) ++discordant;
    }
  }
  const auto n = static_cast<std::int64_t>(h.size());
  const std::int64_t pairs = n * (n - 1) / 2;
  if (variant == KendallVariant::kTauA) {
    return static_cast<double>(concordant - discordant) / static_cast<double>(pairs);
  }
  const double denom = std::sqrt(static_cast<double>(pairs - tied_h)) *
                       std::sqrt(static_cast<double>(pairs - tied_g));
  require(denom > 0.0, ErrorKind::kUndefinedCorrelation, "kendall tau-b of a constant sequence");
  return detail::clamp_unit(static_cast<double>(concordant - discordant) / denom);
}

inline double mae(std::span<const double> h, std::span<const double> g) {
  detail::check_pair(h, g, 1);
  double sum = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) sum += std::abs(h[i] - g[i]);
  return sum / static_cast<double>(h.size());
}

inline MetricsReport compute_report(std::span<const double> h, std::span<const double> g,
                                    KendallVariant variant = KendallVariant::kTauA) {
  MetricsReport r;
  r.pearson = pearson(h, g);
  r.spearman_rho = spearman(h, g);
  r.kendall_tau = kendall(h, g, variant);
  r.mae = mae(h, g);
  r.n = h.size();
  return r;
}

namespace detail {

template <typename F>
double or_nan(F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kUndefinedCorrelation) throw;
    return std::numeric_limits<double>::quiet_NaN();
  }
}

}  // namespace detail

// As compute_report, but a correlation that is undefined (constant input)
// comes back as NaN instead of raising.
inline MetricsReport lenient_report(std::span<const double> h, std::span<const double> g,
                                    KendallVariant variant = KendallVariant::kTauA) {
  MetricsReport r;
  r.pearson = detail::or_nan([&] { return pearson(h, g); });
  r.spearman_rho = detail::or_nan([&] { return spearman(h, g); });
  r.kendall_tau = detail::or_nan([&] { return kendall(h, g, variant); });
  r.mae = mae(h, g);
  r.n = h.size();
  return r;
}

inline MetricsReport compute_report(const EstimatePair& p,
                                    KendallVariant variant = KendallVariant::kTauA) {
  return compute_report(p.estimates, p.truth, variant);
}

// Pooled: one report over the concatenation of all pairs. Mean: unweighted
// average of per-recording reports.
inline MetricsReport aggregate(std::span<const EstimatePair> recordings, AggregateMode mode,
                               KendallVariant variant = KendallVariant::kTauA) {
  require(!recordings.empty(), ErrorKind::kInvalidArgument, "nothing to aggregate");
  if (mode == AggregateMode::kPooled) {
    EstimatePair all;
    for (const auto& r : recordings) {
      require(r.estimates.size() == r.truth.size(), ErrorKind::kLengthMismatch,
              "estimate and truth lengths differ");
      all.estimates.insert(all.estimates.end(), r.estimates.begin(), r.estimates.end());
      all.truth.insert(all.truth.end(), r.truth.begin(), r.truth.end());
    }
    return compute_report(all, variant);
  }
  MetricsReport mean;
  for (const auto& r : recordings) {
    const MetricsReport one = compute_report(r, variant);
    mean.pearson += one.pearson;
    mean.spearman_rho += one.spearman_rho;
    mean.kendall_tau += one.kendall_tau;
    mean.mae += one.mae;
    mean.n += one.n;
  }
  const double k = static_cast<double>(recordings.size());
  mean.pearson /= k;
  mean.spearman_rho /= k;
  mean.kendall_tau /= k;
  mean.mae /= k;
  return mean;
}

}  // namespace heartbeat
