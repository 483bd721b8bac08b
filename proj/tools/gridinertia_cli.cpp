// gridinertia: regional inertia estimation from multi-sensor frequency
// recordings of grid disturbances.
//
//   gridinertia analyze   --traces <dir> --event <json> --region <json> --out <dir>
//   gridinertia batch     --manifest <json> --out <dir> [--layout rows|columns]
//   gridinertia synth     --out <dir> [--spec <json>] [--h ..] [--dp ..] [--sensors ..] [--seed ..]
//   gridinertia selfcheck
//   gridinertia report    --results <file|dir>... --out <csv> [--layout rows|columns]
//
// Analysis settings resolve as flags > --config file > defaults.
//
// Exit codes: 0 success, 1 selfcheck failure or usage error, 2 analysis or
// input failure.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gridinertia/gridinertia.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace gridinertia {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitAnalysisFailed = 2;

struct SettingsFlags {
  std::string config_path;
  bool print_config = false;
  std::optional<double> rocof_window;
  std::optional<double> rocof_horizon;
  std::optional<double> onset_window;
  std::optional<double> nominal_hz;
  std::optional<std::string> filter;
  std::optional<std::string> filter_order;
};

void add_settings_flags(CLI::App* cmd, SettingsFlags& f) {
  cmd->add_option("--config", f.config_path, "JSON file with analysis settings");
  cmd->add_flag("--print-config", f.print_config, "Print the resolved settings as JSON");
  cmd->add_option("--rocof-window", f.rocof_window, "RoCoF window (s)");
  cmd->add_option("--rocof-horizon", f.rocof_horizon, "RoCoF horizon after onset (s)");
  cmd->add_option("--onset-window", f.onset_window, "Onset pre/post window (s)");
  cmd->add_option("--nominal-hz", f.nominal_hz, "Nominal system frequency (Hz)");
  cmd->add_option("--filter", f.filter, "Two-point filter policy")->check(CLI::IsMember({"auto", "on", "off"}));
  cmd->add_option("--filter-order", f.filter_order, "Filter before or after spatial averaging")
      ->check(CLI::IsMember({"per-sensor", "after-average"}));
}

json settings_to_json(const AnalysisOptions& o) {
  return {{"nominal_frequency_hz", o.constants.nominal_frequency_hz},
          {"rocof_window_s", o.constants.rocof_window_s},
          {"rocof_horizon_s", o.constants.rocof_horizon_s},
          {"onset_window_s", o.constants.onset_window_s},
          {"min_rocof_hz_per_s", o.constants.min_rocof_hz_per_s},
          {"search_half_width_s", o.constants.search_half_width_s},
          {"filter", to_string(o.filter)},
          {"filter_order", o.filter_order == FilterOrder::kPerSensorFirst ? "per-sensor" : "after-average"}};
}

FilterOrder filter_order_from_string(const std::string& s) {
  if (s == "per-sensor") return FilterOrder::kPerSensorFirst;
  if (s == "after-average") return FilterOrder::kAfterAveraging;
  throw Error("cli", "config", "unknown filter order '" + s + "'");
}

AnalysisOptions resolve_settings(const SettingsFlags& f) {
  AnalysisOptions o;
  if (!f.config_path.empty()) {
    std::ifstream in(f.config_path);
    if (!in) throw Error("cli", "config", "cannot read " + f.config_path);
    json j;
    try {
      j = json::parse(in);
    } catch (const json::exception& e) {
      throw Error("cli", "config", f.config_path + ": " + e.what());
    }
    auto& c = o.constants;
    c.nominal_frequency_hz = j.value("nominal_frequency_hz", c.nominal_frequency_hz);
    c.rocof_window_s = j.value("rocof_window_s", c.rocof_window_s);
    c.rocof_horizon_s = j.value("rocof_horizon_s", c.rocof_horizon_s);
    c.onset_window_s = j.value("onset_window_s", c.onset_window_s);
    c.min_rocof_hz_per_s = j.value("min_rocof_hz_per_s", c.min_rocof_hz_per_s);
    c.search_half_width_s = j.value("search_half_width_s", c.search_half_width_s);
    if (j.contains("filter")) o.filter = filter_mode_from_string(j["filter"].get<std::string>());
    if (j.contains("filter_order")) o.filter_order = filter_order_from_string(j["filter_order"].get<std::string>());
  }
  if (f.rocof_window) o.constants.rocof_window_s = *f.rocof_window;
  if (f.rocof_horizon) o.constants.rocof_horizon_s = *f.rocof_horizon;
  if (f.onset_window) o.constants.onset_window_s = *f.onset_window;
  if (f.nominal_hz) o.constants.nominal_frequency_hz = *f.nominal_hz;
  if (f.filter) o.filter = filter_mode_from_string(*f.filter);
  if (f.filter_order) o.filter_order = filter_order_from_string(*f.filter_order);
  if (const auto problems = validate_constants(o.constants); !problems.empty()) {
    throw Error("cli", "config", problems.front());
  }
  if (f.print_config) std::cout << settings_to_json(o).dump(2) << "\n";
  return o;
}

void write_text(const fs::path& path, const std::string& text) {
  gridinertia::detail::write_text_file(path, text, "cli", "write");
}

TableLayout layout_from_string(const std::string& s) {
  return s == "columns" ? TableLayout::kColumnPerEvent : TableLayout::kRowPerEvent;
}

// --- analyze -----------------------------------------------------------------

struct AnalyzeArgs {
  std::string traces;
  std::string event;
  std::string region;
  std::string out = ".";
  bool no_series = false;
  SettingsFlags settings;
};

EventAnalysis analyze_paths(const fs::path& traces, const fs::path& event_path, const fs::path& region_path,
                            const AnalysisOptions& options) {
  const DisturbanceEvent event = read_event_json(event_path);
  const RegionDescriptor region = read_region_json(region_path);
  const TraceBundle bundle = load_bundle(traces, region.region);
  return analyze_event(bundle, region.region, event, options);
}

int run_analyze(const AnalyzeArgs& a) {
  try {
    const AnalysisOptions options = resolve_settings(a.settings);
    const EventAnalysis analysis = analyze_paths(a.traces, a.event, a.region, options);
    fs::create_directories(a.out);
    write_text(fs::path(a.out) / "result.json", result_to_json(analysis.result).dump(2) + "\n");
    if (!a.no_series) write_text(fs::path(a.out) / "series.csv", series_to_csv(analysis.artifacts));
    for (const auto& d : analysis.result.diagnostics) std::cerr << "warning: " << d << "\n";
    std::cout << table_to_csv({{analysis.result.event_id, analysis.result}}, TableLayout::kColumnPerEvent);
    return kExitOk;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
  }
  return kExitAnalysisFailed;
}

// --- batch -------------------------------------------------------------------

struct BatchArgs {
  std::string manifest;
  std::string out = ".";
  std::string layout = "rows";
  SettingsFlags settings;
};

struct BatchOutcome {
  TableEntry entry;
  std::vector<std::string> diagnostics;
};

int run_batch(const BatchArgs& a) {
  AnalysisOptions options;
  json manifest;
  try {
    options = resolve_settings(a.settings);
    std::ifstream in(a.manifest);
    if (!in) throw Error("cli", "batch", "cannot read manifest " + a.manifest);
    try {
      manifest = json::parse(in);
    } catch (const json::exception& e) {
      throw Error("cli", "batch", "unreadable manifest " + a.manifest + ": " + e.what());
    }
    if (!manifest.contains("events") || !manifest["events"].is_array()) {
      throw Error("cli", "batch", "manifest " + a.manifest + " has no 'events' array");
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitAnalysisFailed;
  }

  const fs::path base = fs::path(a.manifest).parent_path();
  const auto resolve = [&](const json& entry, const char* key) {
    const fs::path p = entry.value(key, std::string{});
    return p.is_absolute() ? p : base / p;
  };
  const fs::path out_dir(a.out);
  fs::create_directories(out_dir / "results");

  std::vector<std::future<BatchOutcome>> jobs;
  std::size_t index = 0;
  for (const auto& entry : manifest["events"]) {
    ++index;
    // A manifest id wins over the event file's id so repeated ids stay distinct.
    const bool has_id = entry.contains("id");
    const std::string fallback_id = entry.value("id", "event_" + std::to_string(index));
    const fs::path traces = resolve(entry, "traces");
    const fs::path event = resolve(entry, "event");
    const fs::path region = resolve(entry, "region");
    jobs.push_back(std::async(std::launch::async, [=, &options, &out_dir]() {
      BatchOutcome outcome;
      outcome.entry.event_id = fallback_id;
      try {
        const EventAnalysis analysis = analyze_paths(traces, event, region, options);
        if (!has_id) outcome.entry.event_id = analysis.result.event_id;
        outcome.entry.result = analysis.result;
        outcome.diagnostics = analysis.result.diagnostics;
        write_text(out_dir / "results" / (outcome.entry.event_id + ".json"),
                   result_to_json(analysis.result).dump(2) + "\n");
      } catch (const std::exception& e) {
        outcome.diagnostics.push_back(std::string("error: ") + e.what());
      }
      return outcome;
    }));
  }

  std::vector<TableEntry> entries;
  json sidecar = json::object();
  std::size_t failed = 0;
  for (auto& job : jobs) {
    BatchOutcome o = job.get();
    if (!o.entry.result) ++failed;
    sidecar[o.entry.event_id] = o.diagnostics;
    entries.push_back(std::move(o.entry));
  }
  write_text(out_dir / "table.csv", table_to_csv(entries, layout_from_string(a.layout)));
  write_text(out_dir / "diagnostics.json", sidecar.dump(2) + "\n");
  if (entries.empty()) std::cerr << "warning: manifest lists no events; wrote an empty table\n";
  if (failed > 0) std::cerr << "warning: " << failed << " of " << entries.size() << " events failed; see diagnostics.json\n";
  return kExitOk;
}

// --- synth -------------------------------------------------------------------

struct SynthArgs {
  std::string out;
  std::string spec_path;
  std::optional<double> h;
  std::optional<double> dp;
  std::optional<std::size_t> sensors;
  std::optional<std::size_t> region_sensors;
  std::optional<double> noise;
  std::optional<double> sample_rate;
  std::optional<double> onset;
  std::optional<double> length;
  std::optional<double> droop;
  std::optional<double> gov_tc;
  std::optional<double> nominal_hz;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> kind;
};

int run_synth(const SynthArgs& a) {
  try {
    SynthSpec spec;
    spec.governor.droop_mw_per_hz = 2000.0;
    if (!a.spec_path.empty()) {
      std::ifstream in(a.spec_path);
      if (!in) throw Error("cli", "synth", "cannot read " + a.spec_path);
      try {
        spec = synth_spec_from_json(json::parse(in));
      } catch (const json::exception& e) {
        throw Error("cli", "synth", a.spec_path + ": " + e.what());
      }
    }
    if (a.h) spec.true_h_mva_s = *a.h;
    if (a.dp) spec.delta_p_mw = *a.dp;
    if (a.sample_rate) spec.sample_rate = *a.sample_rate;
    if (a.onset) spec.onset_time = *a.onset;
    if (a.length) spec.record_length_s = *a.length;
    if (a.droop) spec.governor.droop_mw_per_hz = *a.droop;
    if (a.gov_tc) spec.governor.time_constant_s = *a.gov_tc;
    if (a.nominal_hz) spec.f_s = *a.nominal_hz;
    if (a.seed) spec.seed = *a.seed;
    if (a.kind) spec.kind = event_kind_from_string(*a.kind);
    if (a.sensors || spec.sensors.empty()) {
      const std::size_t count = a.sensors.value_or(5);
      const std::size_t in_region = a.region_sensors.value_or((count + 2) / 3);
      spec.sensors = default_sensor_layout(count, std::min(in_region, count), a.noise.value_or(0.0));
    } else if (a.noise) {
      for (auto& s : spec.sensors) s.noise_std_hz = *a.noise;
    }
    const SynthDataset ds = generate(spec);
    write_dataset(a.out, ds);
    std::cout << "wrote " << ds.bundle.traces.size() << " traces to " << a.out << "\n";
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitAnalysisFailed;
  }
}

// --- selfcheck ---------------------------------------------------------------

int run_selfcheck_cmd() {
  const auto checks = run_selfcheck(published_caiso_events());
  std::size_t failed = 0;
  for (const auto& c : checks) {
    std::cout << (c.passed ? "PASS  " : "FAIL  ") << c.name << "  " << c.detail << "\n";
    if (!c.passed) ++failed;
  }
  std::cout << (checks.size() - failed) << "/" << checks.size() << " checks passed\n";
  return failed == 0 ? kExitOk : kExitCheckFailed;
}

// --- report ------------------------------------------------------------------

struct ReportArgs {
  std::vector<std::string> results;
  std::string out;
  std::string layout = "rows";
};

int run_report(const ReportArgs& a) {
  try {
    std::vector<fs::path> files;
    for (const auto& r : a.results) {
      if (fs::is_directory(r)) {
        std::vector<fs::path> found;
        for (const auto& e : fs::recursive_directory_iterator(r)) {
          if (e.is_regular_file() && e.path().extension() == ".json" && e.path().filename() != "diagnostics.json") {
            found.push_back(e.path());
          }
        }
        std::sort(found.begin(), found.end());
        files.insert(files.end(), found.begin(), found.end());
      } else {
        files.emplace_back(r);
      }
    }
    std::vector<TableEntry> entries;
    for (const auto& f : files) {
      std::ifstream in(f);
      if (!in) throw Error("cli", "report", "cannot read " + f.string());
      json j;
      try {
        j = json::parse(in);
      } catch (const json::exception& e) {
        throw Error("cli", "report", f.string() + ": " + e.what());
      }
      AnalysisResult r = result_from_json(j);
      entries.push_back({r.event_id, std::move(r)});
    }
    const std::string csv = table_to_csv(entries, layout_from_string(a.layout));
    if (a.out.empty() || a.out == "-") {
      std::cout << csv;
    } else {
      write_text(a.out, csv);
    }
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitAnalysisFailed;
  }
}

}  // namespace
}  // namespace gridinertia

int main(int argc, char** argv) {
  using namespace gridinertia;
  CLI::App app{"Regional inertia estimation from multi-sensor grid frequency recordings"};
  app.require_subcommand(1);

  AnalyzeArgs analyze;
  auto* analyze_cmd = app.add_subcommand("analyze", "Analyze one disturbance event");
  analyze_cmd->add_option("--traces", analyze.traces, "Directory with one trace CSV per sensor")->required();
  analyze_cmd->add_option("--event", analyze.event, "Event descriptor JSON")->required();
  analyze_cmd->add_option("--region", analyze.region, "Sensor/region descriptor JSON")->required();
  analyze_cmd->add_option("--out", analyze.out, "Output directory");
  analyze_cmd->add_flag("--no-series", analyze.no_series, "Skip series.csv");
  add_settings_flags(analyze_cmd, analyze.settings);

  BatchArgs batch;
  auto* batch_cmd = app.add_subcommand("batch", "Analyze every event in a manifest");
  batch_cmd->add_option("--manifest", batch.manifest, "Manifest JSON")->required();
  batch_cmd->add_option("--out", batch.out, "Output directory");
  batch_cmd->add_option("--layout", batch.layout, "rows: one row per event; columns: one column per event")
      ->check(CLI::IsMember({"rows", "columns"}));
  add_settings_flags(batch_cmd, batch.settings);

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic disturbance dataset");
  synth_cmd->set_help_flag("--help", "Print this help message and exit");  // frees -h for --h
  synth_cmd->add_option("--out", synth.out, "Output directory")->required();
  synth_cmd->add_option("--spec", synth.spec_path, "Synthetic spec JSON (flags override)");
  synth_cmd->add_option("--h", synth.h, "True inertia H*S (MVA*s)");
  synth_cmd->add_option("--dp", synth.dp, "Power mismatch (MW)");
  synth_cmd->add_option("--sensors", synth.sensors, "Number of sensors");
  synth_cmd->add_option("--region-sensors", synth.region_sensors, "How many sensors belong to the region");
  synth_cmd->add_option("--noise", synth.noise, "White noise std per sensor (Hz)");
  synth_cmd->add_option("--sample-rate", synth.sample_rate, "Samples per second");
  synth_cmd->add_option("--onset", synth.onset, "Onset time into the record (s)");
  synth_cmd->add_option("--length", synth.length, "Record length (s)");
  synth_cmd->add_option("--droop", synth.droop, "Governor droop (MW/Hz)");
  synth_cmd->add_option("--gov-tc", synth.gov_tc, "Governor time constant (s)");
  synth_cmd->add_option("--nominal-hz", synth.nominal_hz, "Nominal frequency (Hz)");
  synth_cmd->add_option("--seed", synth.seed, "Noise seed");
  synth_cmd->add_option("--kind", synth.kind, "Event kind")->check(CLI::IsMember({"generation_trip", "load_loss"}));

  app.add_subcommand("selfcheck", "Run the built-in consistency checks");

  ReportArgs report;
  auto* report_cmd = app.add_subcommand("report", "Build the metric table from result.json files");
  report_cmd->add_option("--results", report.results, "result.json files or directories")->required();
  report_cmd->add_option("--out", report.out, "Output CSV (default stdout)");
  report_cmd->add_option("--layout", report.layout, "rows or columns")->check(CLI::IsMember({"rows", "columns"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitCheckFailed;
  }

  if (*analyze_cmd) return run_analyze(analyze);
  if (*batch_cmd) return run_batch(batch);
  if (*synth_cmd) return run_synth(synth);
  if (*report_cmd) return run_report(report);
  return run_selfcheck_cmd();
}
