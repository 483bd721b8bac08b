#pragma once

// Disturbance onset: the grid instant with the largest difference between the
// least-squares slope of the window ending at t and the window starting at t.

#include <cmath>
#include <span>
#include <string>

#include "gridinertia/slope.hpp"
#include "gridinertia/trace.hpp"

namespace gridinertia {

struct OnsetResult {
  double onset_time = 0.0;
  std::size_t onset_index = 0;  // index into the analysed trace
  double grid_t0 = 0.0;
  double sample_interval = 0.0;
  double rocof_pre = 0.0;
  double rocof_post = 0.0;
  double score = 0.0;
  TimeSpan search_span;
};

inline constexpr double kMinOnsetScore = 1e-6;

// Both windows include t itself. Candidates whose windows would leave the
// trace or touch a gap are skipped; ties go to the earliest candidate.
inline OnsetResult detect_onset(const FrequencyTrace& trace, const TimeSpan& search_span,
                                double window_s) {
  const char* op = "detect_onset";
  const double dt = trace.sample_interval;
  const long long w = std::llround(window_s / dt);
  if (w < 1) throw Error("onset", op, "onset window shorter than one sample interval");
  const long long n = static_cast<long long>(trace.size());

  const long long span_lo = static_cast<long long>(std::ceil((search_span.start - trace.t0) / dt - 1e-6));
  const long long span_hi = static_cast<long long>(std::floor((search_span.end - trace.t0) / dt + 1e-6));
  const long long lo = std::max(span_lo, w);
  const long long hi = std::min(span_hi, n - 1 - w);
  if (hi < lo) throw Error("onset", op, "search span too short for the onset window");

  const std::span<const double> samples(trace.samples);
  const auto window_len = static_cast<std::size_t>(w + 1);
  OnsetResult best;
  best.score = -1.0;
  bool any_candidate = false;
  for (long long k = lo; k <= hi; ++k) {
    const auto kk = static_cast<std::size_t>(k);
    if (trace.has_gap(kk - static_cast<std::size_t>(w), kk + static_cast<std::size_t>(w))) continue;
    any_candidate = true;
    const double pre = least_squares_slope(samples.subspan(kk - static_cast<std::size_t>(w), window_len), dt);
    const double post = least_squares_slope(samples.subspan(kk, window_len), dt);
    const double score = std::abs(pre - post);
    if (score > best.score) {
      best.onset_index = kk;
      best.rocof_pre = pre;
      best.rocof_post = post;
      best.score = score;
    }
  }
  if (!any_candidate) throw Error("onset", op, "every candidate window contains a gap");
  if (best.score < kMinOnsetScore) throw Error("onset", op, "no onset found");
  best.onset_time = trace.time_at(best.onset_index);
  best.grid_t0 = trace.t0;
  best.sample_interval = dt;
  best.search_span = search_span;
  return best;
}

// Onset of the interconnection reference minus onset of the region, in
// seconds; an exact multiple of the grid interval.
inline double arrival_time(const OnsetResult& region_onset, const OnsetResult& intercon_onset,
                           Diagnostics& diagnostics) {
  const char* op = "arrival_time";
  const double dt = region_onset.sample_interval;
  if (!(dt > 0.0) || std::abs(intercon_onset.sample_interval - dt) > 1e-9 * dt) {
    throw Error("onset", op, "onsets come from different grid intervals");
  }
  const double origin_shift = (intercon_onset.grid_t0 - region_onset.grid_t0) / dt;
  if (std::abs(origin_shift - std::round(origin_shift)) > 1e-3) {
    throw Error("onset", op, "onsets come from misaligned grids");
  }
  const long long steps = static_cast<long long>(intercon_onset.onset_index) +
                          std::llround(origin_shift) -
                          static_cast<long long>(region_onset.onset_index);
  if (steps < 0) {
    diagnostics.push_back("negative arrival: interconnection onset precedes the region by " +
                          std::to_string(-static_cast<double>(steps) * dt) + " s");
  }
  return static_cast<double>(steps) * dt;
}

inline double arrival_time(const OnsetResult& region_onset, const OnsetResult& intercon_onset) {
  Diagnostics ignored;
  return arrival_time(region_onset, intercon_onset, ignored);
}

}  // namespace gridinertia
