#pragma once

// Reference signals built from a bundle: the weighted regional mean, the
// interconnection-wide median, and the two-point mean filter.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "gridinertia/ingest.hpp"
#include "gridinertia/trace.hpp"

namespace gridinertia {

inline constexpr const char* kInterconnectionId = "INTERCONNECTION";

inline FrequencyTrace regional_frequency(const TraceBundle& bundle, const RegionDefinition& region,
                                         Diagnostics& diagnostics) {
  const char* op = "regional_frequency";
  struct Member {
    const FrequencyTrace* trace;
    double weight;
  };
  std::vector<Member> members;
  for (std::size_t i = 0; i < region.member_sensor_ids.size(); ++i) {
    if (const auto* tr = bundle.find(region.member_sensor_ids[i])) {
      members.push_back({tr, region.weight_of(i)});
    }
  }
  if (members.empty()) throw Error("preprocess", op, "no region members present in bundle");
  const std::size_t n = members.front().trace->size();
  if (n < 2) throw Error("preprocess", op, "zero overlap between member traces");

  FrequencyTrace out{region.region_id, members.front().trace->t0,
                     members.front().trace->sample_interval, std::vector<double>(n, kGap)};
  std::size_t sparse_points = 0;
  for (std::size_t k = 0; k < n; ++k) {
    double acc = 0.0;
    double wsum = 0.0;
    std::size_t contributing = 0;
    for (const auto& m : members) {
      const double v = m.trace->samples[k];
      if (is_gap(v)) continue;
      acc += m.weight * v;
      wsum += m.weight;
      ++contributing;
    }
    if (contributing == 0 || !(wsum > 0.0)) continue;
    if (2 * contributing < members.size()) ++sparse_points;
    out.samples[k] = acc / wsum;
  }
  if (sparse_points > 0) {
    diagnostics.push_back("regional frequency: " + std::to_string(sparse_points) +
                          " grid points averaged fewer than half of the members");
  }
  return out;
}

inline FrequencyTrace regional_frequency(const TraceBundle& bundle, const RegionDefinition& region) {
  Diagnostics ignored;
  return regional_frequency(bundle, region, ignored);
}

// Median of the values in `v` (reorders it). Even counts use the midpoint of
// the central pair.
inline double median_in_place(std::vector<double>& v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<long>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<long>(mid));
  return 0.5 * (lower + upper);
}

inline FrequencyTrace interconnection_frequency(const TraceBundle& bundle) {
  if (bundle.empty()) throw Error("preprocess", "interconnection_frequency", "empty bundle");
  const auto& first = bundle.traces.begin()->second;
  FrequencyTrace out{kInterconnectionId, first.t0, first.sample_interval,
                     std::vector<double>(first.size(), kGap)};
  std::vector<double> values;
  values.reserve(bundle.traces.size());
  for (std::size_t k = 0; k < first.size(); ++k) {
    values.clear();
    for (const auto& [id, tr] : bundle.traces) {
      if (!is_gap(tr.samples[k])) values.push_back(tr.samples[k]);
    }
    if (!values.empty()) out.samples[k] = median_in_place(values);
  }
  return out;
}

// y[i] = (x[i] + x[i+1]) / 2, last sample passed through. A gap on either
// side of a pair yields a gap.
inline FrequencyTrace two_point_mean_filter(const FrequencyTrace& trace) {
  if (trace.size() < 2) throw Error("preprocess", "two_point_mean_filter", "trace length < 2");
  FrequencyTrace out = trace;
  for (std::size_t i = 0; i + 1 < trace.size(); ++i) {
    out.samples[i] = 0.5 * (trace.samples[i] + trace.samples[i + 1]);  // NaN propagates
  }
  return out;
}

// Standard deviation of first differences over [span.start, span.start + 1 s].
// Returns 0 when fewer than two differences are available.
inline double noise_score(const FrequencyTrace& trace, const TimeSpan& span) {
  const double dt = trace.sample_interval;
  const long long first = std::max(0LL, static_cast<long long>(std::ceil((span.start - trace.t0) / dt - 1e-6)));
  const long long last = std::min(static_cast<long long>(trace.size()) - 1,
                                  first + static_cast<long long>(std::llround(1.0 / dt)));
  std::vector<double> d;
  for (long long k = first + 1; k <= last; ++k) {
    const double a = trace.samples[static_cast<std::size_t>(k - 1)];
    const double b = trace.samples[static_cast<std::size_t>(k)];
    if (!is_gap(a) && !is_gap(b)) d.push_back(b - a);
  }
  if (d.size() < 2) return 0.0;
  double mean = 0.0;
  for (double x : d) mean += x;
  mean /= static_cast<double>(d.size());
  double ss = 0.0;
  for (double x : d) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(d.size() - 1));
}

inline constexpr double kNoiseScoreThresholdHz = 0.005;

enum class FilterMode { kAuto, kOn, kOff };
enum class FilterOrder { kPerSensorFirst, kAfterAveraging };

inline const char* to_string(FilterMode m) {
  switch (m) {
    case FilterMode::kAuto: return "auto";
    case FilterMode::kOn: return "on";
    case FilterMode::kOff: return "off";
  }
  return "auto";
}

inline FilterMode filter_mode_from_string(const std::string& s) {
  if (s == "auto") return FilterMode::kAuto;
  if (s == "on") return FilterMode::kOn;
  if (s == "off") return FilterMode::kOff;
  throw Error("preprocess", "filter_mode_from_string", "unknown filter mode '" + s + "'");
}

inline bool should_filter(FilterMode mode, const FrequencyTrace& trace, const TimeSpan& noise_span) {
  switch (mode) {
    case FilterMode::kOn: return true;
    case FilterMode::kOff: return false;
    case FilterMode::kAuto: return noise_score(trace, noise_span) > kNoiseScoreThresholdHz;
  }
  return false;
}

// Applies the filter policy to every trace in a bundle; names filtered
// sensors in the diagnostics.
inline TraceBundle filter_bundle(const TraceBundle& bundle, FilterMode mode,
                                 const TimeSpan& noise_span, Diagnostics& diagnostics) {
  TraceBundle out = bundle;
  for (auto& [id, tr] : out.traces) {
    if (should_filter(mode, tr, noise_span)) {
      tr = two_point_mean_filter(tr);
      if (mode == FilterMode::kAuto) diagnostics.push_back("noise filter applied to " + id);
    }
  }
  return out;
}

}  // namespace gridinertia
