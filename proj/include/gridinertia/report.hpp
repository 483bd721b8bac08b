#pragma once

// Reporting boundary: result.json, the per-event metric table and plot
// series. This is the only place RoCoF is converted to mHz/s.

#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gridinertia/pipeline.hpp"
#include "gridinertia/timestamp.hpp"
#include "gridinertia/trace.hpp"

namespace gridinertia {

inline constexpr double kMilliPerUnit = 1000.0;

inline double to_mhz_per_s(double hz_per_s) { return hz_per_s * kMilliPerUnit; }
inline double from_mhz_per_s(double mhz_per_s) { return mhz_per_s / kMilliPerUnit; }

inline nlohmann::json result_to_json(const AnalysisResult& r) {
  nlohmann::json per_sensor = nlohmann::json::object();
  for (const auto& [id, v] : r.per_sensor_rocof) per_sensor[id] = to_mhz_per_s(v);
  return {{"event_id", r.event_id},
          {"kind", to_string(r.kind)},
          {"delta_p_mw", r.delta_p_mw},
          {"interconnection_rocof_mhz_s", to_mhz_per_s(r.interconnection_rocof_hz_s)},
          {"regional_rocof_mhz_s", to_mhz_per_s(r.regional_rocof_hz_s)},
          {"local_rocof_mhz_s", to_mhz_per_s(r.local_rocof_hz_s)},
          {"local_rocof_sensor", r.local_rocof_sensor},
          {"per_sensor_rocof_mhz_s", per_sensor},
          {"h_intercon_mva_s", r.h_intercon_mva_s},
          {"h_region_mva_s", r.h_region_mva_s},
          {"h_local_mva_s", r.h_local_mva_s},
          {"arrival_time_s", r.arrival_time_s},
          {"region_to_system_ratio", r.region_to_system_ratio},
          {"onset_time_region", format_iso8601(r.onset_time_region)},
          {"onset_time_intercon", format_iso8601(r.onset_time_intercon)},
          {"diagnostics", r.diagnostics}};
}

inline AnalysisResult result_from_json(const nlohmann::json& j) {
  const char* op = "result_from_json";
  try {
    AnalysisResult r;
    r.event_id = j.at("event_id").get<std::string>();
    r.kind = event_kind_from_string(j.at("kind").get<std::string>());
    r.delta_p_mw = j.at("delta_p_mw").get<double>();
    r.interconnection_rocof_hz_s = from_mhz_per_s(j.at("interconnection_rocof_mhz_s").get<double>());
    r.regional_rocof_hz_s = from_mhz_per_s(j.at("regional_rocof_mhz_s").get<double>());
    r.local_rocof_hz_s = from_mhz_per_s(j.at("local_rocof_mhz_s").get<double>());
    r.local_rocof_sensor = j.value("local_rocof_sensor", std::string{});
    const nlohmann::json per_sensor = j.value("per_sensor_rocof_mhz_s", nlohmann::json::object());
    for (const auto& [id, v] : per_sensor.items()) {
      r.per_sensor_rocof[id] = from_mhz_per_s(v.get<double>());
    }
    r.h_intercon_mva_s = j.at("h_intercon_mva_s").get<double>();
    r.h_region_mva_s = j.at("h_region_mva_s").get<double>();
    r.h_local_mva_s = j.at("h_local_mva_s").get<double>();
    r.arrival_time_s = j.at("arrival_time_s").get<double>();
    r.region_to_system_ratio = j.at("region_to_system_ratio").get<double>();
    const auto tr = parse_iso8601(j.at("onset_time_region").get<std::string>());
    const auto ti = parse_iso8601(j.at("onset_time_intercon").get<std::string>());
    if (!tr || !ti) throw Error("cli", op, "bad onset timestamp");
    r.onset_time_region = *tr;
    r.onset_time_intercon = *ti;
    r.diagnostics = j.value("diagnostics", std::vector<std::string>{});
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error("cli", op, e.what());
  }
}

// One table entry; `result` is empty when the event failed.
struct TableEntry {
  std::string event_id;
  std::optional<AnalysisResult> result;
};

enum class TableLayout { kRowPerEvent, kColumnPerEvent };

struct TableColumn {
  const char* key;
  double (*value)(const AnalysisResult&);
  const char* format;
};

inline const std::vector<TableColumn>& table_columns() {
  static const std::vector<TableColumn> columns = {
      {"power_mismatch_mw", [](const AnalysisResult& r) { return r.delta_p_mw; }, "%.3f"},
      {"interconnection_max_rocof_mhz_s",
       [](const AnalysisResult& r) { return to_mhz_per_s(r.interconnection_rocof_hz_s); }, "%.3f"},
      {"regional_rocof_mhz_s", [](const AnalysisResult& r) { return to_mhz_per_s(r.regional_rocof_hz_s); },
       "%.3f"},
      {"local_rocof_mhz_s", [](const AnalysisResult& r) { return to_mhz_per_s(r.local_rocof_hz_s); }, "%.3f"},
      {"h_intercon_mva_s", [](const AnalysisResult& r) { return r.h_intercon_mva_s; }, "%.0f"},
      {"h_region_mva_s", [](const AnalysisResult& r) { return r.h_region_mva_s; }, "%.0f"},
      {"h_local_mva_s", [](const AnalysisResult& r) { return r.h_local_mva_s; }, "%.0f"},
      {"arrival_time_s", [](const AnalysisResult& r) { return r.arrival_time_s; }, "%.1f"},
      {"h_region_over_h_intercon_pct", [](const AnalysisResult& r) { return 100.0 * r.region_to_system_ratio; },
       "%.1f"},
  };
  return columns;
}

namespace detail {

inline std::string format_cell(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace detail

// Failed events keep their slot with empty cells.
inline std::string table_to_csv(const std::vector<TableEntry>& entries, TableLayout layout) {
  const auto& cols = table_columns();
  std::string out;
  if (layout == TableLayout::kRowPerEvent) {
    out += "event_id";
    for (const auto& c : cols) out += std::string(",") + c.key;
    out += '\n';
    for (const auto& e : entries) {
      out += detail::csv_escape(e.event_id);
      for (const auto& c : cols) {
        out += ',';
        if (e.result) out += detail::format_cell(c.format, c.value(*e.result));
      }
      out += '\n';
    }
    return out;
  }
  out += "metric";
  for (const auto& e : entries) out += "," + detail::csv_escape(e.event_id);
  out += '\n';
  for (const auto& c : cols) {
    out += c.key;
    for (const auto& e : entries) {
      out += ',';
      if (e.result) out += detail::format_cell(c.format, c.value(*e.result));
    }
    out += '\n';
  }
  return out;
}

// Regional and interconnection traces with onset and peak-window markers.
inline std::string series_to_csv(const PipelineArtifacts& art) {
  std::string out =
      "timestamp,t_rel_s,regional_hz,interconnection_hz,region_onset,intercon_onset,"
      "regional_peak_window,intercon_peak_window\n";
  const FrequencyTrace& reg = art.regional;
  const FrequencyTrace& ic = art.interconnection;
  const auto in_window = [](const std::optional<RocofEstimate>& r, const FrequencyTrace& tr, std::size_t k) {
    if (!r) return false;
    const auto steps = static_cast<std::size_t>(std::llround(r->window_s / tr.sample_interval));
    return k >= r->window_index && k <= r->window_index + steps;
  };
  char buf[64];
  for (std::size_t k = 0; k < reg.size(); ++k) {
    out += format_iso8601(reg.time_at(k));
    std::snprintf(buf, sizeof buf, ",%.6f,", static_cast<double>(k) * reg.sample_interval);
    out += buf;
    if (!is_gap(reg.samples[k])) out += detail::format_cell("%.9f", reg.samples[k]);
    out += ',';
    if (k < ic.size() && !is_gap(ic.samples[k])) out += detail::format_cell("%.9f", ic.samples[k]);
    out += art.region_onset && art.region_onset->onset_index == k ? ",1" : ",0";
    out += art.intercon_onset && art.intercon_onset->onset_index == k ? ",1" : ",0";
    out += in_window(art.regional_rocof, reg, k) ? ",1" : ",0";
    out += in_window(art.intercon_rocof, ic, k) ? ",1" : ",0";
    out += '\n';
  }
  return out;
}

}  // namespace gridinertia
