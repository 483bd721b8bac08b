#pragma once

// Trace CSV and descriptor JSON I/O, regularization onto a uniform grid, and
// assembly of multi-sensor bundles sharing one grid.
//
// Trace CSV: header `timestamp,frequency_hz`, then one row per sample with an
// ISO-8601 UTC timestamp and a decimal Hz value (empty field = gap). The file
// stem is the sensor id.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "gridinertia/timestamp.hpp"
#include "gridinertia/trace.hpp"

namespace gridinertia {

struct RawSample {
  double timestamp = 0.0;
  double frequency_hz = kGap;
};

struct ParsedTrace {
  std::string sensor_id;
  std::vector<RawSample> samples;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r' ||
                        s.front() == '\n')) {
    s.remove_prefix(1);
  }
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '\n')) {
    s.remove_suffix(1);
  }
  return s;
}

inline std::optional<double> parse_double(std::string_view s) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

// Grid points within this fraction of an interval count as coincident.
inline constexpr double kGridTolerance = 1e-3;

}  // namespace detail

inline ParsedTrace parse_trace_stream(std::istream& in, std::string sensor_id) {
  const char* op = "parse_trace_file";
  ParsedTrace out{std::move(sensor_id), {}};
  std::string line;
  if (!std::getline(in, line)) throw Error("ingest", op, "missing header");
  std::string_view header = detail::trim(line);
  if (header.size() >= 3 && header.substr(0, 3) == "\xEF\xBB\xBF") header.remove_prefix(3);
  if (header != "timestamp,frequency_hz") {
    throw Error("ingest", op, "missing header: expected 'timestamp,frequency_hz'");
  }
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    const std::string_view text = detail::trim(line);
    if (text.empty()) continue;
    const auto comma = text.find(',');
    if (comma == std::string_view::npos) {
      throw Error("ingest", op, "row " + std::to_string(row) + ": expected two fields");
    }
    const std::string_view ts = detail::trim(text.substr(0, comma));
    const std::string_view fv = detail::trim(text.substr(comma + 1));
    const auto t = parse_iso8601(ts);
    if (!t) {
      throw Error("ingest", op, "row " + std::to_string(row) + ": unparseable timestamp '" +
                                    std::string(ts) + "'");
    }
    RawSample sample{*t, kGap};
    if (!fv.empty()) {
      const auto v = detail::parse_double(fv);
      if (!v || !std::isfinite(*v)) {
        throw Error("ingest", op, "row " + std::to_string(row) + ": unparseable frequency '" +
                                      std::string(fv) + "'");
      }
      sample.frequency_hz = *v;
    }
    if (!out.samples.empty() && !(sample.timestamp > out.samples.back().timestamp)) {
      throw Error("ingest", op, "row " + std::to_string(row) + ": non-monotonic timestamp");
    }
    out.samples.push_back(sample);
  }
  return out;
}

inline ParsedTrace parse_trace_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("ingest", "parse_trace_file", "cannot read " + path.string());
  return parse_trace_stream(in, path.stem().string());
}

inline std::vector<RawSample> to_raw_samples(const FrequencyTrace& trace) {
  std::vector<RawSample> out;
  out.reserve(trace.size());
  for (std::size_t k = 0; k < trace.size(); ++k) out.push_back({trace.time_at(k), trace.samples[k]});
  return out;
}

// Resamples onto the absolute grid k * target_interval. Values are linearly
// interpolated between neighbouring valid samples; grid points inside a hole
// longer than 2 * target_interval (or outside the valid range) become gaps.
inline FrequencyTrace regularize(const std::vector<RawSample>& samples, double target_interval,
                                 std::string sensor_id = {}) {
  const char* op = "regularize";
  if (!(target_interval > 0.0)) throw Error("ingest", op, "target interval must be > 0");
  if (samples.size() < 2) throw Error("ingest", op, "need at least 2 samples");
  std::vector<RawSample> valid;
  for (const auto& s : samples) {
    if (!is_gap(s.frequency_hz)) valid.push_back(s);
  }
  if (valid.empty()) throw Error("ingest", op, "all samples are gap-marked");
  const double first = samples.front().timestamp;
  const double last = samples.back().timestamp;
  if (last - first < 2.0 * target_interval * (1.0 - detail::kGridTolerance)) {
    throw Error("ingest", op, "span shorter than 2 target intervals");
  }

  const double eps = detail::kGridTolerance * target_interval;
  const auto k_first =
      static_cast<long long>(std::ceil(first / target_interval - detail::kGridTolerance));
  const auto k_last =
      static_cast<long long>(std::floor(last / target_interval + detail::kGridTolerance));

  FrequencyTrace out;
  out.sensor_id = std::move(sensor_id);
  out.sample_interval = target_interval;
  out.t0 = static_cast<double>(k_first) * target_interval;
  out.samples.reserve(static_cast<std::size_t>(std::max(0LL, k_last - k_first + 1)));

  std::size_t j = 0;  // last valid sample with timestamp <= t + eps
  for (long long k = k_first; k <= k_last; ++k) {
    const double t = static_cast<double>(k) * target_interval;
    while (j + 1 < valid.size() && valid[j + 1].timestamp <= t + eps) ++j;
    const RawSample& a = valid[j];
    if (std::abs(a.timestamp - t) <= eps) {
      out.samples.push_back(a.frequency_hz);
      continue;
    }
    if (a.timestamp > t || j + 1 >= valid.size()) {
      out.samples.push_back(kGap);
      continue;
    }
    const RawSample& b = valid[j + 1];
    if (b.timestamp - a.timestamp > 2.0 * target_interval + eps) {
      out.samples.push_back(kGap);
      continue;
    }
    const double w = (t - a.timestamp) / (b.timestamp - a.timestamp);
    out.samples.push_back(a.frequency_hz + w * (b.frequency_hz - a.frequency_hz));
  }
  if (out.samples.size() < 2) throw Error("ingest", op, "span shorter than 2 target intervals");
  return out;
}

// A set of traces that all share one grid (same t0, interval and length).
struct TraceBundle {
  std::map<std::string, FrequencyTrace> traces;
  TimeSpan common_span;
  std::vector<std::string> region_present;
  std::vector<std::string> region_missing;
  Diagnostics diagnostics;

  bool empty() const noexcept { return traces.empty(); }
  double sample_interval() const { return traces.begin()->second.sample_interval; }
  double t0() const { return traces.begin()->second.t0; }
  std::size_t length() const { return traces.begin()->second.size(); }

  const FrequencyTrace* find(const std::string& id) const {
    auto it = traces.find(id);
    return it == traces.end() ? nullptr : &it->second;
  }
};

// Crops traces to the intersection of their spans (optionally also to
// `window`) so every member ends up on an identical grid.
inline TraceBundle make_bundle(std::vector<FrequencyTrace> traces,
                               std::optional<TimeSpan> window = std::nullopt) {
  const char* op = "make_bundle";
  TraceBundle bundle;
  if (traces.empty()) return bundle;
  const double dt = traces.front().sample_interval;
  for (const auto& tr : traces) {
    if (std::abs(tr.sample_interval - dt) > 1e-9 * dt) {
      throw Error("ingest", op, "sensor " + tr.sensor_id + " has a different sample interval");
    }
    const double offset = (tr.t0 - traces.front().t0) / dt;
    if (std::abs(offset - std::round(offset)) > detail::kGridTolerance) {
      throw Error("ingest", op, "sensor " + tr.sensor_id + " is not on the common grid");
    }
  }
  // Work in grid indices relative to the first trace.
  const double base = traces.front().t0;
  long long lo = std::numeric_limits<long long>::min();
  long long hi = std::numeric_limits<long long>::max();
  for (const auto& tr : traces) {
    const long long off = std::llround((tr.t0 - base) / dt);
    lo = std::max(lo, off);
    hi = std::min(hi, off + static_cast<long long>(tr.size()) - 1);
  }
  if (window) {
    lo = std::max(lo, static_cast<long long>(
                          std::ceil((window->start - base) / dt - detail::kGridTolerance)));
    hi = std::min(hi, static_cast<long long>(
                          std::floor((window->end - base) / dt + detail::kGridTolerance)));
  }
  if (hi - lo + 1 < 2) {
    throw Error("ingest", op, window ? "window outside common span" : "traces do not overlap");
  }
  const double t0 = base + static_cast<double>(lo) * dt;
  for (auto& tr : traces) {
    const long long off = std::llround((tr.t0 - base) / dt);
    const auto first = static_cast<std::size_t>(lo - off);
    const auto count = static_cast<std::size_t>(hi - lo + 1);
    FrequencyTrace cropped{tr.sensor_id, t0, dt,
                           std::vector<double>(tr.samples.begin() + static_cast<long>(first),
                                               tr.samples.begin() +
                                                   static_cast<long>(first + count))};
    const std::string id = cropped.sensor_id;
    if (!bundle.traces.emplace(id, std::move(cropped)).second) {
      throw Error("ingest", op, "duplicate sensor id " + id);
    }
  }
  bundle.common_span = {t0, t0 + static_cast<double>(hi - lo) * dt};
  return bundle;
}

// Records which region members are present in the bundle.
inline void attach_region_coverage(TraceBundle& bundle, const RegionDefinition& region) {
  bundle.region_present.clear();
  bundle.region_missing.clear();
  for (const auto& id : region.member_sensor_ids) {
    if (bundle.traces.count(id)) {
      bundle.region_present.push_back(id);
    } else {
      bundle.region_missing.push_back(id);
      bundle.diagnostics.push_back("missing sensor " + id);
    }
  }
}

struct LoadOptions {
  double sample_interval = 0.0;  // <= 0: inferred from the raw spacing
};

inline double median_spacing(const std::vector<RawSample>& samples) {
  std::vector<double> d;
  for (std::size_t k = 1; k < samples.size(); ++k) {
    d.push_back(samples[k].timestamp - samples[k - 1].timestamp);
  }
  if (d.empty()) return 0.0;
  std::nth_element(d.begin(), d.begin() + static_cast<long>(d.size() / 2), d.end());
  return d[d.size() / 2];
}

inline TraceBundle load_bundle(const std::filesystem::path& directory,
                               const RegionDefinition& region,
                               std::optional<TimeSpan> window = std::nullopt,
                               const LoadOptions& options = {}) {
  namespace fs = std::filesystem;
  const char* op = "load_bundle";
  if (!fs::is_directory(directory)) {
    throw Error("ingest", op, "not a directory: " + directory.string());
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(directory)) {
    if (entry.is_regular_file() && entry.path().extension() == ".csv") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  Diagnostics diagnostics;
  std::vector<ParsedTrace> parsed;
  for (const auto& f : files) {
    try {
      parsed.push_back(parse_trace_file(f));
    } catch (const Error& e) {
      diagnostics.push_back("sensor " + f.stem().string() + " rejected: " + e.what());
    }
  }

  double dt = options.sample_interval;
  if (!(dt > 0.0)) {
    dt = std::numeric_limits<double>::infinity();
    for (const auto& p : parsed) {
      const double s = median_spacing(p.samples);
      if (s > 0.0) dt = std::min(dt, s);
    }
    if (!std::isfinite(dt)) throw Error("ingest", op, "zero usable sensors in " + directory.string());
    dt = std::round(dt * 1e6) / 1e6;
  }

  std::vector<FrequencyTrace> traces;
  for (auto& p : parsed) {
    try {
      FrequencyTrace tr = regularize(p.samples, dt, p.sensor_id);
      const auto violations = validate_trace(tr);
      if (!violations.empty()) {
        diagnostics.push_back("sensor " + p.sensor_id + " rejected: " + violations.front().message);
        continue;
      }
      traces.push_back(std::move(tr));
    } catch (const Error& e) {
      diagnostics.push_back("sensor " + p.sensor_id + " rejected: " + e.what());
    }
  }
  if (traces.empty()) throw Error("ingest", op, "zero usable sensors in " + directory.string());

  TraceBundle bundle = make_bundle(std::move(traces), window);
  bundle.diagnostics.insert(bundle.diagnostics.begin(), diagnostics.begin(), diagnostics.end());
  attach_region_coverage(bundle, region);
  return bundle;
}

// --- descriptors ----------------------------------------------------------

struct SensorInfo {
  std::string id;
  double lat = 0.0;
  double lon = 0.0;
  bool in_region = false;
};

struct RegionDescriptor {
  RegionDefinition region;
  std::vector<SensorInfo> sensors;
};

namespace detail {

inline nlohmann::json read_json_file(const std::filesystem::path& path, const char* op) {
  std::ifstream in(path);
  if (!in) throw Error("ingest", op, "cannot read " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error("ingest", op, path.string() + ": " + e.what());
  }
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text,
                            const char* module, const char* op) {
  // Write-then-rename so readers never observe a partial file.
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(module, op, "cannot write " + path.string());
    out << text;
    if (!out) throw Error(module, op, "cannot write " + path.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace detail

inline RegionDescriptor region_from_json(const nlohmann::json& j) {
  const char* op = "read_region_json";
  try {
    RegionDescriptor d;
    d.region.region_id = j.at("region_id").get<std::string>();
    for (const auto& s : j.at("sensors")) {
      SensorInfo info;
      info.id = s.at("id").get<std::string>();
      info.lat = s.value("lat", 0.0);
      info.lon = s.value("lon", 0.0);
      info.in_region = s.value("in_region", false);
      if (info.in_region) d.region.member_sensor_ids.push_back(info.id);
      d.sensors.push_back(std::move(info));
    }
    const auto problems = validate_region(d.region);
    if (!problems.empty()) throw Error("ingest", op, problems.front());
    return d;
  } catch (const nlohmann::json::exception& e) {
    throw Error("ingest", op, e.what());
  }
}

inline RegionDescriptor read_region_json(const std::filesystem::path& path) {
  return region_from_json(detail::read_json_file(path, "read_region_json"));
}

inline nlohmann::json to_json(const RegionDescriptor& d) {
  nlohmann::json sensors = nlohmann::json::array();
  for (const auto& s : d.sensors) {
    sensors.push_back({{"id", s.id}, {"lat", s.lat}, {"lon", s.lon}, {"in_region", s.in_region}});
  }
  return {{"region_id", d.region.region_id}, {"sensors", sensors}};
}

inline DisturbanceEvent event_from_json(const nlohmann::json& j) {
  const char* op = "read_event_json";
  try {
    DisturbanceEvent e;
    e.event_id = j.at("event_id").get<std::string>();
    const auto ts = j.at("approx_time").get<std::string>();
    const auto t = parse_iso8601(ts);
    if (!t) throw Error("ingest", op, "bad approx_time '" + ts + "'");
    e.approx_time = *t;
    e.delta_p_mw = j.at("delta_p_mw").get<double>();
    if (!(e.delta_p_mw > 0.0)) throw Error("ingest", op, "delta_p_mw must be > 0");
    e.kind = event_kind_from_string(j.at("kind").get<std::string>());
    e.region_id = j.at("region_id").get<std::string>();
    return e;
  } catch (const nlohmann::json::exception& e) {
    throw Error("ingest", op, e.what());
  }
}

inline DisturbanceEvent read_event_json(const std::filesystem::path& path) {
  return event_from_json(detail::read_json_file(path, "read_event_json"));
}

inline nlohmann::json to_json(const DisturbanceEvent& e) {
  return {{"event_id", e.event_id},
          {"approx_time", format_iso8601(e.approx_time)},
          {"delta_p_mw", e.delta_p_mw},
          {"kind", to_string(e.kind)},
          {"region_id", e.region_id}};
}

inline std::string trace_to_csv(const FrequencyTrace& trace) {
  std::string out = "timestamp,frequency_hz\n";
  char buf[64];
  for (std::size_t k = 0; k < trace.size(); ++k) {
    out += format_iso8601(trace.time_at(k));
    out += ',';
    if (!is_gap(trace.samples[k])) {
      std::snprintf(buf, sizeof buf, "%.9f", trace.samples[k]);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

inline void write_trace_csv(const std::filesystem::path& path, const FrequencyTrace& trace) {
  detail::write_text_file(path, trace_to_csv(trace), "ingest", "write_trace_csv");
}

inline void write_json_file(const std::filesystem::path& path, const nlohmann::json& j) {
  detail::write_text_file(path, j.dump(2) + "\n", "ingest", "write_json_file");
}

}  // namespace gridinertia
