#pragma once

// Peak sliding-window RoCoF after onset, for single traces, the median
// reference, and every region member.

#include <algorithm>
#include <cmath>
#include <map>
#include <span>
#include <string>

#include "gridinertia/ingest.hpp"
#include "gridinertia/onset.hpp"
#include "gridinertia/slope.hpp"
#include "gridinertia/trace.hpp"

namespace gridinertia {

struct RocofEstimate {
  double value_hz_s = 0.0;  // signed
  double window_start = 0.0;
  std::size_t window_index = 0;
  double window_s = 0.0;
  double horizon_s = 0.0;
  std::size_t n_windows_evaluated = 0;
};

// Slides a window_s window one grid step at a time over
// [onset, onset + horizon_s] and returns the slope of largest magnitude.
inline RocofEstimate peak_rocof(const FrequencyTrace& trace, double onset_time,
                                double window_s = 0.1, double horizon_s = 0.5) {
  const char* op = "peak_rocof";
  const double dt = trace.sample_interval;
  const long long window_steps = std::llround(window_s / dt);
  const long long horizon_steps = std::llround(horizon_s / dt);
  if (window_steps < 1) throw Error("rocof", op, "every window holds fewer than 2 samples");
  if (horizon_steps < window_steps) throw Error("rocof", op, "horizon shorter than window");
  const long long onset = trace.nearest_index(onset_time);
  if (onset < 0 || onset + horizon_steps >= static_cast<long long>(trace.size())) {
    throw Error("rocof", op, "insufficient post-onset data");
  }
  const auto first = static_cast<std::size_t>(onset);
  const auto last = static_cast<std::size_t>(onset + horizon_steps);
  if (trace.has_gap(first, last)) throw Error("rocof", op, "gap inside the RoCoF horizon");

  const std::span<const double> samples(trace.samples);
  const auto len = static_cast<std::size_t>(window_steps + 1);
  RocofEstimate best;
  best.window_s = window_s;
  best.horizon_s = horizon_s;
  double best_mag = -1.0;
  for (std::size_t s = first; s + len - 1 <= last; ++s) {
    const double slope = least_squares_slope(samples.subspan(s, len), dt);
    ++best.n_windows_evaluated;
    // Slopes equal up to rounding count as ties; the earlier window wins.
    if (std::abs(slope) > best_mag + 1e-12 * std::max(1.0, best_mag)) {
      best_mag = std::abs(slope);
      best.value_hz_s = slope;
      best.window_index = s;
    }
  }
  best.window_start = trace.time_at(best.window_index);
  return best;
}

inline RocofEstimate interconnection_rocof(const FrequencyTrace& intercon_trace, double onset_time,
                                           const SystemConstants& constants) {
  return peak_rocof(intercon_trace, onset_time, constants.rocof_window_s, constants.rocof_horizon_s);
}

struct LocalRocofSweep {
  std::map<std::string, RocofEstimate> per_sensor;
  std::map<std::string, OnsetResult> onsets;
  std::string worst_sensor;
  RocofEstimate worst;
  Diagnostics diagnostics;
};

// Each present region member gets its own onset inside `search_span`, then
// its own peak RoCoF. Members that fail are reported, not dropped silently.
inline LocalRocofSweep local_rocof_sweep(const TraceBundle& bundle, const RegionDefinition& region,
                                         const TimeSpan& search_span,
                                         const SystemConstants& constants) {
  LocalRocofSweep sweep;
  double worst_mag = -1.0;
  for (const auto& id : region.member_sensor_ids) {
    const FrequencyTrace* tr = bundle.find(id);
    if (!tr) {
      sweep.diagnostics.push_back("local rocof: sensor " + id + " not in bundle");
      continue;
    }
    try {
      const OnsetResult onset = detect_onset(*tr, search_span, constants.onset_window_s);
      const RocofEstimate est =
          peak_rocof(*tr, onset.onset_time, constants.rocof_window_s, constants.rocof_horizon_s);
      sweep.onsets.emplace(id, onset);
      sweep.per_sensor.emplace(id, est);
      if (std::abs(est.value_hz_s) > worst_mag) {
        worst_mag = std::abs(est.value_hz_s);
        sweep.worst = est;
        sweep.worst_sensor = id;
      }
    } catch (const Error& e) {
      sweep.diagnostics.push_back("local rocof: sensor " + id + " failed: " + e.what());
    }
  }
  if (sweep.per_sensor.empty()) {
    throw Error("rocof", "local_rocof_sweep", "no usable region member sensors");
  }
  return sweep;
}

}  // namespace gridinertia
