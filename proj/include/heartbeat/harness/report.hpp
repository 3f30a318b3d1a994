#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "heartbeat/error.hpp"
#include "heartbeat/harness/config.hpp"
#include "heartbeat/harness/io.hpp"
#include "heartbeat/harness/pipeline.hpp"
#include "heartbeat/metrics.hpp"
#include "heartbeat/spectrum.hpp"

namespace heartbeat {

inline std::string_view to_string(TrackerBranch b) {
  switch (b) {
    case TrackerBranch::kBootstrap: return "bootstrap";
    case TrackerBranch::kSelect: return "select";
    case TrackerBranch::kHold: return "hold";
    case TrackerBranch::kPredict: return "predict";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Trace files: `# id: ...` / `# note: ...` comment lines, then
// window,time_s,bpm,truth_bpm,branch with one row per window.

inline std::string trace_csv(const RunResult& run) {
  using detail::format_double;
  std::ostringstream o;
  o << "# id: " << run.id << '\n';
  if (!run.note.empty()) o << "# note: " << run.note << '\n';
  o << "window,time_s,bpm,truth_bpm,branch\n";
  for (std::size_t k = 0; k < run.estimates.size(); ++k) {
    o << k << ',' << format_double(run.timestamps[k]) << ',' << format_double(run.estimates[k])
      << ',' << (run.truth ? format_double((*run.truth)[k]) : std::string()) << ','
      << (k < run.steps.size() ? to_string(run.steps[k].branch) : std::string_view()) << '\n';
  }
  return o.str();
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::kIo, "cannot write '" + path.string() + "'");
  out << text;
  if (!out) fail(ErrorKind::kIo, "failed writing '" + path.string() + "'");
}

struct TraceRecord {
  std::string id;
  std::string note;
  std::vector<double> estimates;
  std::optional<std::vector<double>> truth;
};

inline TraceRecord read_trace(const std::filesystem::path& path) {
  std::istringstream in(detail::read_file(path));
  TraceRecord rec;
  rec.id = path.stem().string();
  std::string line;
  bool header = false;
  std::vector<double> truth;
  std::size_t with_truth = 0, rows = 0, line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view body = detail::trim(line);
    if (body.empty()) continue;
    if (body.front() == '#') {
      if (body.starts_with("# id: ")) rec.id = std::string(body.substr(6));
      if (body.starts_with("# note: ")) rec.note = std::string(body.substr(8));
      continue;
    }
    if (!header) {
      require(body.starts_with("window,time_s,bpm,truth_bpm"), ErrorKind::kMissingColumn,
              path.string() + ": not a trace file");
      header = true;
      continue;
    }
    const auto cells = detail::split_csv(body);
    double bpm = 0.0;
    require(cells.size() >= 4 && detail::parse_double(cells[2], bpm), ErrorKind::kMalformedRow,
            path.string() + ":" + std::to_string(line_no) + ": bad trace row");
    rec.estimates.push_back(bpm);
    ++rows;
    if (!cells[3].empty()) {
      double t = 0.0;
      require(detail::parse_double(cells[3], t), ErrorKind::kMalformedRow,
              path.string() + ":" + std::to_string(line_no) + ": bad truth value");
      truth.push_back(t);
      ++with_truth;
    }
  }
  require(header, ErrorKind::kMissingColumn, path.string() + ": not a trace file");
  if (with_truth > 0) {
    require(with_truth == rows, ErrorKind::kMissingTruth,
            path.string() + ": truth missing on some rows");
    rec.truth = std::move(truth);
  }
  return rec;
}

// ---------------------------------------------------------------------------
// Evaluation tables.

struct EvaluationRow {
  std::string label;
  std::string note;
  // NaN marks a correlation that is undefined for this row (constant input).
  MetricsReport report;
};

struct EvaluationTable {
  AggregateMode mode = AggregateMode::kPooled;
  std::vector<EvaluationRow> recordings;
  EvaluationRow pooled;
  EvaluationRow mean;

  const EvaluationRow& aggregate() const { return mode == AggregateMode::kPooled ? pooled : mean; }
};

namespace detail {

inline std::string fixed(double v, int digits) {
  if (std::isnan(v)) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

inline nlohmann::json to_json(const MetricsReport& r) {
  auto num = [](double v) { return std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(v); };
  return {{"pearson", num(r.pearson)},
          {"spearman", num(r.spearman_rho)},
          {"kendall", num(r.kendall_tau)},
          {"mae", r.mae},
          {"n", r.n}};
}

}  // namespace detail

// Pearson, Spearman and Kendall to three decimals, MAE to two.
inline std::string format_metrics(const MetricsReport& r) {
  return detail::fixed(r.pearson, 3) + ", " + detail::fixed(r.spearman_rho, 3) + ", " +
         detail::fixed(r.kendall_tau, 3) + ", " + detail::fixed(r.mae, 2);
}

inline EvaluationTable evaluate(std::span<const TraceRecord> runs, AggregateMode mode,
                                KendallVariant variant = KendallVariant::kTauA) {
  require(!runs.empty(), ErrorKind::kInvalidArgument, "no runs to evaluate");
  EvaluationTable table;
  table.mode = mode;
  std::vector<double> all_h, all_g;
  double sums[4] = {0, 0, 0, 0};
  std::size_t defined[3] = {0, 0, 0};
  for (const auto& run : runs) {
    require(run.truth.has_value(), ErrorKind::kMissingTruth,
            "run '" + run.id + "' has no ground truth");
    const MetricsReport r = lenient_report(run.estimates, *run.truth, variant);
    table.recordings.push_back({run.id, run.note, r});
    all_h.insert(all_h.end(), run.estimates.begin(), run.estimates.end());
    all_g.insert(all_g.end(), run.truth->begin(), run.truth->end());
    const double corr[3] = {r.pearson, r.spearman_rho, r.kendall_tau};
    for (int i = 0; i < 3; ++i) {
      if (!std::isnan(corr[i])) {
        sums[i] += corr[i];
        ++defined[i];
      }
    }
    sums[3] += r.mae;
  }
  table.pooled = {"pooled", "", lenient_report(all_h, all_g, variant)};
  MetricsReport m;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  m.pearson = defined[0] ? sums[0] / static_cast<double>(defined[0]) : nan;
  m.spearman_rho = defined[1] ? sums[1] / static_cast<double>(defined[1]) : nan;
  m.kendall_tau = defined[2] ? sums[2] / static_cast<double>(defined[2]) : nan;
  m.mae = sums[3] / static_cast<double>(runs.size());
  m.n = all_h.size();
  table.mean = {"mean", "", m};
  return table;
}

inline EvaluationTable evaluate(std::span<const RunResult> runs, AggregateMode mode,
                                KendallVariant variant = KendallVariant::kTauA) {
  std::vector<TraceRecord> traces;
  for (const auto& r : runs) traces.push_back({r.id, r.note, r.estimates, r.truth});
  return evaluate(std::span<const TraceRecord>(traces), mode, variant);
}

inline std::string to_text(const EvaluationTable& t) {
  std::size_t width = 9;
  for (const auto& r : t.recordings) width = std::max(width, r.label.size());
  auto pad = [&](const std::string& s) { return s + std::string(width - s.size() + 2, ' '); };
  std::ostringstream o;
  o << pad("recording") << "pearson, spearman, kendall, mae\n";
  for (const auto& r : t.recordings) {
    o << pad(r.label) << format_metrics(r.report);
    if (!r.note.empty()) o << "  # " << r.note;
    o << '\n';
  }
  const auto& agg = t.aggregate();
  o << pad(agg.label) << format_metrics(agg.report) << '\n';
  return o.str();
}

inline std::string to_json_text(const EvaluationTable& t) {
  nlohmann::json j;
  j["mode"] = std::string(to_string(t.mode));
  j["recordings"] = nlohmann::json::array();
  for (const auto& r : t.recordings) {
    nlohmann::json row = detail::to_json(r.report);
    row["id"] = r.label;
    if (!r.note.empty()) row["note"] = r.note;
    j["recordings"].push_back(row);
  }
  j["aggregate"] = {{"pooled", detail::to_json(t.pooled.report)},
                    {"mean", detail::to_json(t.mean.report)}};
  return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Spectrum dumps and plots.

inline std::string spectrum_csv(const Spectrum& s) {
  std::ostringstream o;
  o << "freq_bpm,power\n";
  for (std::size_t i = 0; i < s.size(); ++i) {
    o << detail::format_double(hz_to_bpm(s.freqs_hz[i])) << ',' << detail::format_double(s.power[i])
      << '\n';
  }
  return o.str();
}

namespace detail {

struct Series {
  std::vector<double> x, y;
  std::string color;
  std::string label;
};

// Minimal line plot; axes autoscale to the data.
inline std::string svg_plot(const std::vector<Series>& series, const std::string& title,
                            const std::string& x_label, const std::string& y_label) {
  constexpr double kW = 640, kH = 360, kL = 60, kR = 20, kT = 30, kB = 45;
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series) {
    for (double v : s.x) x0 = std::min(x0, v), x1 = std::max(x1, v);
    for (double v : s.y) y0 = std::min(y0, v), y1 = std::max(y1, v);
  }
  if (!(x1 > x0)) x1 = x0 + 1;
  if (!(y1 > y0)) y1 = y0 + 1;
  auto px = [&](double v) { return kL + (v - x0) / (x1 - x0) * (kW - kL - kR); };
  auto py = [&](double v) { return kH - kB - (v - y0) / (y1 - y0) * (kH - kT - kB); };
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH << "\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    << "<text x=\"" << kW / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << title
    << "</text>\n"
    << "<line x1=\"" << kL << "\" y1=\"" << kH - kB << "\" x2=\"" << kW - kR << "\" y2=\""
    << kH - kB << "\" stroke=\"black\"/>\n"
    << "<line x1=\"" << kL << "\" y1=\"" << kT << "\" x2=\"" << kL << "\" y2=\"" << kH - kB
    << "\" stroke=\"black\"/>\n"
    << "<text x=\"" << kW / 2 << "\" y=\"" << kH - 10 << "\" text-anchor=\"middle\" font-size=\"12\">"
    << x_label << " [" << fixed(x0, 1) << " .. " << fixed(x1, 1) << "]</text>\n"
    << "<text x=\"14\" y=\"" << kH / 2 << "\" font-size=\"12\" transform=\"rotate(-90 14 " << kH / 2
    << ")\" text-anchor=\"middle\">" << y_label << "</text>\n";
  int legend = 0;
  for (const auto& s : series) {
    o << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.2\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) o << fixed(px(s.x[i]), 2) << ',' << fixed(py(s.y[i]), 2) << ' ';
    o << "\"/>\n";
    o << "<text x=\"" << kW - kR - 120 << "\" y=\"" << kT + 14 * ++legend << "\" font-size=\"11\" fill=\""
      << s.color << "\">" << s.label << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace detail

struct ReportOptions {
  // 0-based windows whose pre/post spectra are dumped.
  std::vector<std::size_t> windows;
  bool plots = false;
};

// Writes `<id>_trace.csv`, `<id>_win<k>_{pre|post}.csv` for each selected
// window and, when requested, SVG plots of both. Returns the paths written.
inline std::vector<std::filesystem::path> emit_reports(const RunResult& run, const PipelineConfig& cfg,
                                                       const std::filesystem::path& out_dir,
                                                       const ReportOptions& options = {}) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  require(std::filesystem::is_directory(out_dir), ErrorKind::kIo,
          "cannot create output directory '" + out_dir.string() + "'");
  std::vector<std::filesystem::path> written;
  auto put = [&](const std::string& name, const std::string& text) {
    const auto p = out_dir / name;
    write_text(p, text);
    written.push_back(p);
  };

  put(run.id + "_trace.csv", trace_csv(run));
  for (std::size_t k : options.windows) {
    const Spectrum pre = window_spectrum(run.prefiltered[0], k, run.sample_rate, cfg);
    const Spectrum post = window_spectrum(run.cleaned[0], k, run.sample_rate, cfg);
    const std::string base = run.id + "_win" + std::to_string(k);
    put(base + "_pre.csv", spectrum_csv(pre));
    put(base + "_post.csv", spectrum_csv(post));
    if (options.plots) {
      std::vector<double> bpm;
      for (double f : pre.freqs_hz) bpm.push_back(hz_to_bpm(f));
      put(base + ".svg", detail::svg_plot({{bpm, pre.power, "#888888", "before RLS"},
                                           {bpm, post.power, "#d62728", "after RLS"}},
                                          run.id + " window " + std::to_string(k), "beats/min",
                                          "spectral density"));
    }
  }
  if (options.plots) {
    std::vector<detail::Series> series = {{run.timestamps, run.estimates, "#1f77b4", "estimate"}};
    if (run.truth) series.push_back({run.timestamps, *run.truth, "#2ca02c", "truth"});
    put(run.id + "_trace.svg", detail::svg_plot(series, run.id, "time (s)", "beats/min"));
  }
  return written;
}

}  // namespace heartbeat
