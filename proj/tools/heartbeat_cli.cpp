// heartbeat: command-line front end.
//
//   heartbeat track    --input rec.csv [--manifest rec.json] [--config f] --out trace.csv
//   heartbeat eval     --runs dir --mode pooled|mean --out table.txt
//   heartbeat spectrum --input rec.csv --window k --stage pre|post --out spectrum.csv
//   heartbeat synth    --preset tone|artifact|chirp --out rec.csv
//
// Exit status: 0 ok, 1 input error, 2 config error, 3 internal invariant.

#include <algorithm>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "heartbeat/heartbeat.hpp"

namespace fs = std::filesystem;
using namespace heartbeat;

namespace {

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfig: return 2;
    case ErrorKind::kInvariant: return 3;
    default: return 1;
  }
}

struct InputArgs {
  std::string input;
  std::string manifest;
  std::string config;
  double sample_rate = 0.0;

  void add_to(CLI::App& cmd) {
    cmd.add_option("--input", input, "recording CSV (ppg1,ppg2,ax,ay,az)")->required();
    cmd.add_option("--manifest", manifest, "JSON manifest (id, sample_rate, truth, note)");
    cmd.add_option("--config", config, "key=value pipeline configuration");
    cmd.add_option("--fs", sample_rate, "sample rate override (Hz)");
  }

  PipelineConfig pipeline_config() const {
    return config.empty() ? PipelineConfig{} : load_config(config);
  }

  Recording load(const PipelineConfig& cfg) const {
    LoadOptions opt;
    opt.plan = cfg.window;
    if (!manifest.empty()) opt = load_manifest(manifest, opt);
    if (sample_rate != 0.0) opt.sample_rate = sample_rate;
    return load_recording(input, opt);
  }
};

void print_metrics(const RunResult& run) {
  if (!run.truth) return;
  const EvaluationTable t = evaluate(std::span<const RunResult>(&run, 1), AggregateMode::kPooled);
  std::cout << run.id << ": " << format_metrics(t.recordings.front().report)
            << "  (pearson, spearman, kendall, mae)\n";
}

std::vector<TraceRecord> read_runs(const fs::path& dir) {
  require(fs::is_directory(dir), ErrorKind::kIo, "'" + dir.string() + "' is not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".csv") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<TraceRecord> runs;
  for (const auto& f : files) {
    try {
      runs.push_back(read_trace(f));
    } catch (const Error& e) {
      // Spectrum dumps and other CSVs share the directory.
      if (e.kind() != ErrorKind::kMissingColumn) throw;
    }
  }
  require(!runs.empty(), ErrorKind::kInvalidArgument, "no trace files in '" + dir.string() + "'");
  return runs;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Heart-rate estimation from wrist PPG and acceleration"};
  app.require_subcommand(1);

  InputArgs track_in;
  std::string track_out, reports_dir;
  std::vector<std::size_t> report_windows;
  bool plots = false;
  auto* track = app.add_subcommand("track", "estimate heart rate per window");
  track_in.add_to(*track);
  track->add_option("--out", track_out, "trace CSV to write")->required();
  track->add_option("--reports", reports_dir, "directory for spectrum dumps and plots");
  track->add_option("--windows", report_windows, "0-based windows to dump (with --reports)")
      ->delimiter(',');
  track->add_flag("--plots", plots, "also write SVG plots (with --reports)");

  std::string runs_dir, eval_out, mode_name = "pooled", kendall_name = "tau_a";
  auto* eval = app.add_subcommand("eval", "tabulate metrics over trace files");
  eval->add_option("--runs", runs_dir, "directory of trace CSVs")->required();
  eval->add_option("--mode", mode_name, "aggregate mode")
      ->check(CLI::IsMember({"pooled", "mean"}));
  eval->add_option("--kendall", kendall_name, "Kendall variant")
      ->check(CLI::IsMember({"tau_a", "tau_b"}));
  eval->add_option("--out", eval_out, "text table to write (JSON goes to <out>.json)")->required();

  InputArgs spec_in;
  std::size_t spec_window = 0;
  std::string stage_name, spec_out;
  int channel = 1;
  auto* spectrum = app.add_subcommand("spectrum", "dump one window's periodogram");
  spec_in.add_to(*spectrum);
  spectrum->add_option("--window", spec_window, "0-based window index")->required();
  spectrum->add_option("--stage", stage_name, "before or after motion cancellation")
      ->required()
      ->check(CLI::IsMember({"pre", "post"}));
  spectrum->add_option("--channel", channel, "PPG channel")->check(CLI::Range(1, 2));
  spectrum->add_option("--out", spec_out, "CSV to write (freq_bpm,power)")->required();

  std::string preset_name, synth_out;
  SynthOptions synth_opt;
  auto* synth = app.add_subcommand("synth", "write a synthetic recording with ground truth");
  synth->add_option("--preset", preset_name, "fixture kind")
      ->required()
      ->check(CLI::IsMember({"tone", "artifact", "chirp"}));
  synth->add_option("--out", synth_out, "CSV to write; .truth and .json go beside it")->required();
  synth->add_option("--seed", synth_opt.seed, "noise seed");
  synth->add_option("--duration", synth_opt.duration_seconds, "seconds (0 = preset default)");
  synth->add_option("--fs", synth_opt.sample_rate, "sample rate (Hz)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*track) {
      const PipelineConfig cfg = track_in.pipeline_config();
      const Recording rec = track_in.load(cfg);
      const RunResult run = run_pipeline(rec, cfg);
      write_text(track_out, trace_csv(run));
      if (!reports_dir.empty()) emit_reports(run, cfg, reports_dir, {report_windows, plots});
      print_metrics(run);
    } else if (*eval) {
      const auto runs = read_runs(runs_dir);
      const auto mode = mode_name == "mean" ? AggregateMode::kMean : AggregateMode::kPooled;
      const auto variant = kendall_name == "tau_b" ? KendallVariant::kTauB : KendallVariant::kTauA;
      const EvaluationTable table = evaluate(std::span<const TraceRecord>(runs), mode, variant);
      const std::string text = to_text(table);
      write_text(eval_out, text);
      write_text(eval_out + ".json", to_json_text(table));
      std::cout << text;
    } else if (*spectrum) {
      const PipelineConfig cfg = spec_in.pipeline_config();
      const Recording rec = spec_in.load(cfg);
      const CleanedChannels ch = clean_channels(rec, cfg);
      const int c = channel - 1;
      const Signal& x = stage_name == "pre" ? ch.prefiltered[c] : ch.cleaned[c];
      write_text(spec_out, spectrum_csv(window_spectrum(x, spec_window, rec.sample_rate, cfg)));
    } else if (*synth) {
      Recording rec = synthesize(parse_preset(preset_name), synth_opt);
      save_recording(rec, synth_out);
    }
  } catch (const Error& e) {
    std::cerr << "heartbeat: " << to_string(e.kind()) << ": " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "heartbeat: internal error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
