#pragma once

// End-to-end event analysis: filter -> reference signals -> onsets -> RoCoF
// -> inertia -> metric row.

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "gridinertia/inertia.hpp"
#include "gridinertia/ingest.hpp"
#include "gridinertia/onset.hpp"
#include "gridinertia/preprocess.hpp"
#include "gridinertia/rocof.hpp"
#include "gridinertia/trace.hpp"

namespace gridinertia {

struct AnalysisOptions {
  SystemConstants constants;
  FilterMode filter = FilterMode::kAuto;
  FilterOrder filter_order = FilterOrder::kPerSensorFirst;
};

// Intermediate signals kept for plotting.
struct PipelineArtifacts {
  FrequencyTrace regional;
  FrequencyTrace interconnection;
  TimeSpan search_span;
  std::optional<OnsetResult> region_onset;
  std::optional<OnsetResult> intercon_onset;
  std::optional<RocofEstimate> regional_rocof;
  std::optional<RocofEstimate> intercon_rocof;
};

struct EventAnalysis {
  AnalysisResult result;
  PipelineArtifacts artifacts;
};

// approx_time +- half width, clipped to the bundle.
inline TimeSpan search_span_for(const DisturbanceEvent& event, const TraceBundle& bundle,
                                const SystemConstants& constants) {
  if (!bundle.common_span.contains(event.approx_time)) {
    throw Error("trace-model", "DisturbanceEvent",
                "approx_time " + format_iso8601(event.approx_time) + " outside the trace span");
  }
  return {std::max(bundle.common_span.start, event.approx_time - constants.search_half_width_s),
          std::min(bundle.common_span.end, event.approx_time + constants.search_half_width_s)};
}

inline EventAnalysis analyze_event(const TraceBundle& bundle, const RegionDefinition& region,
                                   const DisturbanceEvent& event, const AnalysisOptions& options = {}) {
  const SystemConstants& c = options.constants;
  if (const auto problems = validate_constants(c); !problems.empty()) {
    throw Error("trace-model", "SystemConstants", problems.front());
  }
  if (!(event.delta_p_mw > 0.0)) throw Error("trace-model", "DisturbanceEvent", "delta_p_mw must be > 0");
  if (bundle.empty()) throw Error("ingest", "load_bundle", "empty bundle");

  EventComponents comp;
  comp.diagnostics = bundle.diagnostics;
  if (!event.region_id.empty() && event.region_id != region.region_id) {
    comp.diagnostics.push_back("event region '" + event.region_id + "' differs from region '" +
                               region.region_id + "'");
  }

  EventAnalysis out;
  PipelineArtifacts& art = out.artifacts;
  art.search_span = search_span_for(event, bundle, c);
  const TimeSpan noise_span{art.search_span.start, art.search_span.start + 1.0};

  const bool per_sensor_first = options.filter_order == FilterOrder::kPerSensorFirst;
  const TraceBundle working =
      per_sensor_first ? filter_bundle(bundle, options.filter, noise_span, comp.diagnostics) : bundle;

  art.regional = regional_frequency(working, region, comp.diagnostics);
  art.interconnection = interconnection_frequency(working);
  if (!per_sensor_first) {
    if (should_filter(options.filter, art.regional, noise_span)) {
      art.regional = two_point_mean_filter(art.regional);
    }
    if (should_filter(options.filter, art.interconnection, noise_span)) {
      art.interconnection = two_point_mean_filter(art.interconnection);
    }
  }

  std::vector<std::string> failures;
  const auto attempt = [&](const char* metric, auto&& step) {
    try {
      step();
    } catch (const Error& e) {
      failures.push_back(std::string(metric) + ": " + e.what());
    }
  };

  attempt("regional onset", [&] {
    comp.region_onset = detect_onset(art.regional, art.search_span, c.onset_window_s);
  });
  attempt("interconnection onset", [&] {
    comp.intercon_onset = detect_onset(art.interconnection, art.search_span, c.onset_window_s);
  });
  if (comp.region_onset) {
    attempt("regional rocof", [&] {
      comp.regional_rocof =
          peak_rocof(art.regional, comp.region_onset->onset_time, c.rocof_window_s, c.rocof_horizon_s);
    });
  }
  if (comp.intercon_onset) {
    attempt("interconnection rocof", [&] {
      comp.intercon_rocof = interconnection_rocof(art.interconnection, comp.intercon_onset->onset_time, c);
    });
  }
  attempt("local rocof", [&] { comp.local = local_rocof_sweep(working, region, art.search_span, c); });

  if (comp.regional_rocof) {
    attempt("regional inertia", [&] {
      comp.h_region = inertia_from_rocof(event.delta_p_mw, *comp.regional_rocof, c.nominal_frequency_hz,
                                         c.min_rocof_hz_per_s, event.event_id);
    });
  }
  if (comp.intercon_rocof) {
    attempt("interconnection inertia", [&] {
      comp.h_intercon = inertia_from_rocof(event.delta_p_mw, *comp.intercon_rocof,
                                           c.nominal_frequency_hz, c.min_rocof_hz_per_s, event.event_id);
    });
  }
  if (comp.local) {
    attempt("local inertia", [&] {
      comp.h_local = inertia_from_rocof(event.delta_p_mw, comp.local->worst, c.nominal_frequency_hz,
                                        c.min_rocof_hz_per_s, event.event_id);
    });
  }

  art.region_onset = comp.region_onset;
  art.intercon_onset = comp.intercon_onset;
  art.regional_rocof = comp.regional_rocof;
  art.intercon_rocof = comp.intercon_rocof;

  if (!failures.empty()) {
    std::string joined;
    for (const auto& f : failures) joined += (joined.empty() ? "" : "; ") + f;
    throw Error("pipeline", "analyze_event", joined);
  }
  out.result = assemble_result(event, comp);
  return out;
}

}  // namespace gridinertia
