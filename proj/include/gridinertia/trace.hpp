#pragma once

// Core domain types: frequency traces, regions, events, constants and the
// per-event result row. Units are fixed throughout the library:
//   frequency Hz, RoCoF Hz/s, power MW, inertia MVA*s, time in seconds.
// mHz/s appears only in the reporting layer (report.hpp).

#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gridinertia {

using Diagnostics = std::vector<std::string>;

// Every library failure carries the module and operation that raised it so
// front ends can report provenance.
class Error : public std::runtime_error {
 public:
  Error(std::string module, std::string operation, const std::string& message)
      : std::runtime_error(module + "::" + operation + ": " + message),
        module_(std::move(module)),
        operation_(std::move(operation)),
        message_(message) {}

  const std::string& module() const noexcept { return module_; }
  const std::string& operation() const noexcept { return operation_; }
  const std::string& message() const noexcept { return message_; }

 private:
  std::string module_;
  std::string operation_;
  std::string message_;
};

// Gap samples are stored as quiet NaN.
inline constexpr double kGap = std::numeric_limits<double>::quiet_NaN();
inline bool is_gap(double v) noexcept { return std::isnan(v); }

inline constexpr double kMinPhysicalHz = 55.0;
inline constexpr double kMaxPhysicalHz = 65.0;

// Closed time interval in absolute UTC seconds.
struct TimeSpan {
  double start = 0.0;
  double end = 0.0;

  double length() const noexcept { return end - start; }
  bool contains(double t) const noexcept { return t >= start && t <= end; }
};

// One sensor's frequency samples on a uniform grid t0 + k * sample_interval.
struct FrequencyTrace {
  std::string sensor_id;
  double t0 = 0.0;
  double sample_interval = 0.1;
  std::vector<double> samples;

  std::size_t size() const noexcept { return samples.size(); }
  double time_at(std::size_t k) const noexcept {
    return t0 + static_cast<double>(k) * sample_interval;
  }
  double end_time() const noexcept {
    return samples.empty() ? t0 : time_at(samples.size() - 1);
  }
  TimeSpan span() const noexcept { return {t0, end_time()}; }

  // Grid index nearest to t (may be out of range; caller checks).
  long long nearest_index(double t) const noexcept {
    return std::llround((t - t0) / sample_interval);
  }

  bool has_gap(std::size_t first, std::size_t last) const noexcept {
    for (std::size_t k = first; k <= last && k < samples.size(); ++k) {
      if (is_gap(samples[k])) return true;
    }
    return false;
  }
};

enum class TraceRule { kSampleInterval, kLength, kBand };

struct TraceViolation {
  TraceRule rule;
  std::size_t index;  // first offending sample (0 for whole-trace rules)
  std::string message;
};

inline const char* to_string(TraceRule rule) {
  switch (rule) {
    case TraceRule::kSampleInterval: return "sample_interval";
    case TraceRule::kLength: return "length";
    case TraceRule::kBand: return "band";
  }
  return "unknown";
}

// Empty result iff the trace is usable downstream.
inline std::vector<TraceViolation> validate_trace(const FrequencyTrace& trace) {
  std::vector<TraceViolation> out;
  if (!(trace.sample_interval > 0.0) || !std::isfinite(trace.sample_interval)) {
    out.push_back({TraceRule::kSampleInterval, 0,
                   "sample_interval must be strictly positive"});
  }
  if (trace.samples.size() < 2) {
    out.push_back({TraceRule::kLength, 0, "trace needs at least 2 samples"});
  }
  for (std::size_t k = 0; k < trace.samples.size(); ++k) {
    const double v = trace.samples[k];
    if (is_gap(v)) continue;
    if (!(v >= kMinPhysicalHz && v <= kMaxPhysicalHz)) {
      out.push_back({TraceRule::kBand, k,
                     "sample " + std::to_string(k) + " = " + std::to_string(v) +
                         " Hz outside [55, 65] Hz"});
      break;
    }
  }
  return out;
}

struct RegionDefinition {
  std::string region_id;
  std::vector<std::string> member_sensor_ids;
  std::vector<double> weights;  // empty -> uniform

  bool contains(const std::string& sensor_id) const {
    for (const auto& id : member_sensor_ids) {
      if (id == sensor_id) return true;
    }
    return false;
  }

  double weight_of(std::size_t member) const {
    return weights.empty() ? 1.0 / static_cast<double>(member_sensor_ids.size())
                           : weights[member];
  }
};

inline std::vector<std::string> validate_region(const RegionDefinition& region) {
  std::vector<std::string> out;
  if (region.member_sensor_ids.empty()) out.push_back("region has no members");
  std::set<std::string> seen;
  for (const auto& id : region.member_sensor_ids) {
    if (!seen.insert(id).second) out.push_back("duplicate member " + id);
  }
  if (!region.weights.empty()) {
    if (region.weights.size() != region.member_sensor_ids.size()) {
      out.push_back("weights and members differ in count");
    } else {
      double sum = 0.0;
      for (double w : region.weights) {
        if (!(w >= 0.0)) out.push_back("negative weight");
        sum += w;
      }
      if (std::abs(sum - 1.0) > 1e-9) out.push_back("weights do not sum to 1");
    }
  }
  return out;
}

enum class EventKind { kGenerationTrip, kLoadLoss };

inline const char* to_string(EventKind kind) {
  return kind == EventKind::kGenerationTrip ? "generation_trip" : "load_loss";
}

inline EventKind event_kind_from_string(const std::string& s) {
  if (s == "generation_trip") return EventKind::kGenerationTrip;
  if (s == "load_loss") return EventKind::kLoadLoss;
  throw Error("trace-model", "event_kind_from_string", "unknown event kind '" + s + "'");
}

// Direction of the frequency excursion implied by the event kind.
inline double expected_sign(EventKind kind) {
  return kind == EventKind::kGenerationTrip ? -1.0 : 1.0;
}

struct DisturbanceEvent {
  std::string event_id;
  double approx_time = 0.0;  // coarse hint, +-30 s
  double delta_p_mw = 0.0;   // magnitude; direction comes from kind
  EventKind kind = EventKind::kGenerationTrip;
  std::string region_id;
};

struct SystemConstants {
  double nominal_frequency_hz = 60.0;
  double rocof_window_s = 0.1;
  double rocof_horizon_s = 0.5;
  double onset_window_s = 0.5;
  double min_rocof_hz_per_s = 1e-4;
  double search_half_width_s = 30.0;
};

inline std::vector<std::string> validate_constants(const SystemConstants& c) {
  std::vector<std::string> out;
  if (!(c.nominal_frequency_hz > 0.0)) out.push_back("nominal frequency must be > 0");
  if (!(c.rocof_window_s > 0.0)) out.push_back("rocof window must be > 0");
  if (!(c.rocof_window_s <= c.rocof_horizon_s)) out.push_back("rocof window exceeds horizon");
  if (!(c.onset_window_s > 0.0)) out.push_back("onset window must be > 0");
  if (!(c.min_rocof_hz_per_s > 0.0)) out.push_back("rocof guard must be > 0");
  if (!(c.search_half_width_s > 0.0)) out.push_back("search half width must be > 0");
  return out;
}

// One metric row per event. RoCoF fields are in Hz/s and signed.
struct AnalysisResult {
  std::string event_id;
  EventKind kind = EventKind::kGenerationTrip;
  double delta_p_mw = 0.0;
  double interconnection_rocof_hz_s = 0.0;
  double regional_rocof_hz_s = 0.0;
  double local_rocof_hz_s = 0.0;
  std::string local_rocof_sensor;
  std::map<std::string, double> per_sensor_rocof;
  double h_intercon_mva_s = 0.0;
  double h_region_mva_s = 0.0;
  double h_local_mva_s = 0.0;
  double arrival_time_s = 0.0;
  double region_to_system_ratio = 0.0;
  double onset_time_region = 0.0;
  double onset_time_intercon = 0.0;
  Diagnostics diagnostics;
};

}  // namespace gridinertia
