#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "heartbeat/error.hpp"
#include "heartbeat/harness/config.hpp"
#include "heartbeat/signal_core.hpp"

namespace heartbeat {

// Interchange format:
//   <base>.csv    header `ppg1,ppg2,ax,ay,az` (any order, extra columns
//                 ignored), then one row of numbers per sample;
//   <base>.truth  optional, one ground-truth BPM per analysis window;
//   <base>.json   optional manifest {"id", "sample_rate", "truth", "note"}.
inline constexpr std::array<std::string_view, 5> kSignalColumns = {"ppg1", "ppg2", "ax", "ay", "az"};

struct LoadOptions {
  double sample_rate = kCanonicalSampleRate;
  std::string id;  // defaults to the file stem
  std::optional<std::filesystem::path> truth_path;
  // Pick up `<base>.truth` beside the CSV when truth_path is unset.
  bool sibling_truth = true;
  std::string note;
  WindowPlan plan;
};

namespace detail {

inline std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma == std::string_view::npos ? comma : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace detail

inline std::vector<double> load_truth(const std::filesystem::path& path) {
  const std::string text = detail::read_file(path);
  std::istringstream in(text);
  std::string line;
  std::vector<double> truth;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view body = detail::trim(line);
    if (body.empty() || body.front() == '#') continue;
    double v = 0.0;
    if (!detail::parse_double(body, v) || !std::isfinite(v)) {
      fail(ErrorKind::kMalformedRow,
           path.string() + ":" + std::to_string(line_no) + ": expected one BPM value");
    }
    truth.push_back(v);
  }
  return truth;
}

inline Recording load_recording(const std::filesystem::path& path, const LoadOptions& options = {}) {
  require(options.sample_rate > 0.0 && std::isfinite(options.sample_rate),
          ErrorKind::kInvalidSampleRate, "sample rate must be positive");
  const std::string text = detail::read_file(path);
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;

  std::array<std::size_t, 5> column{};
  std::size_t header_width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto cells = detail::split_csv(line);
    header_width = cells.size();
    for (std::size_t c = 0; c < kSignalColumns.size(); ++c) {
      const auto it = std::find(cells.begin(), cells.end(), kSignalColumns[c]);
      if (it == cells.end()) {
        fail(ErrorKind::kMissingColumn,
             path.string() + ": header lacks column '" + std::string(kSignalColumns[c]) + "'");
      }
      column[c] = static_cast<std::size_t>(it - cells.begin());
    }
    break;
  }
  if (header_width == 0) fail(ErrorKind::kMissingColumn, path.string() + ": empty file");

  Recording rec;
  rec.sample_rate = options.sample_rate;
  rec.id = options.id.empty() ? path.stem().string() : options.id;
  rec.note = options.note;
  std::array<Signal*, 5> channels = {&rec.ppg[0], &rec.ppg[1], &rec.accel[0], &rec.accel[1],
                                     &rec.accel[2]};
  // A channel may end early (empty trailing cells); that is reported as a
  // channel-length mismatch rather than a malformed row.
  std::array<bool, 5> ended{};
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto cells = detail::split_csv(line);
    const std::string where = path.string() + ":" + std::to_string(line_no);
    if (cells.size() != header_width) {
      fail(ErrorKind::kMalformedRow, where + ": expected " + std::to_string(header_width) +
                                         " fields, found " + std::to_string(cells.size()));
    }
    for (std::size_t c = 0; c < channels.size(); ++c) {
      const std::string_view cell = cells[column[c]];
      if (cell.empty()) {
        ended[c] = true;
        continue;
      }
      double v = 0.0;
      if (ended[c] || !detail::parse_double(cell, v) || !std::isfinite(v)) {
        fail(ErrorKind::kMalformedRow, where + ": bad value '" + std::string(cell) + "' in column '" +
                                           std::string(kSignalColumns[c]) + "'");
      }
      channels[c]->push_back(v);
    }
  }

  std::optional<std::filesystem::path> truth_path = options.truth_path;
  if (!truth_path && options.sibling_truth) {
    auto sibling = path;
    sibling.replace_extension(".truth");
    if (std::filesystem::exists(sibling)) truth_path = sibling;
  }
  if (truth_path) rec.truth_bpm = load_truth(*truth_path);

  rec.validate(options.plan);
  return rec;
}

// Reads a manifest and merges it into `base`. Relative truth paths resolve
// against the manifest's directory.
inline LoadOptions load_manifest(const std::filesystem::path& path, LoadOptions base = {}) {
  try {
    const nlohmann::json j = nlohmann::json::parse(detail::read_file(path));
    require(j.is_object(), ErrorKind::kMalformedRow, path.string() + ": manifest must be an object");
    if (j.contains("sample_rate")) {
      require(j["sample_rate"].is_number(), ErrorKind::kInvalidSampleRate,
              path.string() + ": sample_rate must be a number");
      base.sample_rate = j["sample_rate"].get<double>();
      require(base.sample_rate > 0.0, ErrorKind::kInvalidSampleRate,
              path.string() + ": sample_rate must be positive");
    }
    if (j.contains("id")) base.id = j["id"].get<std::string>();
    if (j.contains("note")) base.note = j["note"].get<std::string>();
    if (j.contains("truth") && !j["truth"].is_null()) {
      std::filesystem::path t = j["truth"].get<std::string>();
      if (t.is_relative()) t = path.parent_path() / t;
      base.truth_path = t;
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kMalformedRow, path.string() + ": " + e.what());
  }
  return base;
}

// Writes `<base>.csv`, `<base>.json` and, when present, `<base>.truth`.
// Values use the shortest round-trip representation, so reloading is
// bit-identical.
inline void save_recording(const Recording& rec, const std::filesystem::path& csv_path) {
  std::ofstream out(csv_path, std::ios::binary);
  if (!out) fail(ErrorKind::kIo, "cannot write '" + csv_path.string() + "'");
  out << "ppg1,ppg2,ax,ay,az\n";
  std::string row;
  for (std::size_t i = 0; i < rec.length(); ++i) {
    row.clear();
    for (const Signal* ch : {&rec.ppg[0], &rec.ppg[1], &rec.accel[0], &rec.accel[1], &rec.accel[2]}) {
      if (!row.empty()) row += ',';
      row += detail::format_double((*ch)[i]);
    }
    out << row << '\n';
  }
  if (!out) fail(ErrorKind::kIo, "failed writing '" + csv_path.string() + "'");

  nlohmann::json manifest = {{"id", rec.id}, {"sample_rate", rec.sample_rate}};
  if (!rec.note.empty()) manifest["note"] = rec.note;
  if (rec.truth_bpm) {
    auto truth_path = csv_path;
    truth_path.replace_extension(".truth");
    std::ofstream t(truth_path);
    if (!t) fail(ErrorKind::kIo, "cannot write '" + truth_path.string() + "'");
    for (double v : *rec.truth_bpm) t << detail::format_double(v) << '\n';
    manifest["truth"] = truth_path.filename().string();
  }
  auto manifest_path = csv_path;
  manifest_path.replace_extension(".json");
  std::ofstream m(manifest_path);
  if (!m) fail(ErrorKind::kIo, "cannot write '" + manifest_path.string() + "'");
  m << manifest.dump(2) << '\n';
}

}  // namespace heartbeat
