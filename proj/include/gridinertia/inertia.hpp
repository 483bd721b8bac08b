#pragma once

// Swing-equation inertia (the product H*S in MVA*s) from a power mismatch and
// an initial RoCoF, plus assembly of the per-event metric row.

#include <cmath>
#include <optional>
#include <string>

#include "gridinertia/onset.hpp"
#include "gridinertia/rocof.hpp"
#include "gridinertia/trace.hpp"

namespace gridinertia {

struct InertiaEstimate {
  double h_times_s_mva_s = 0.0;
  RocofEstimate source_rocof;
  double delta_p_mw = 0.0;
  double nominal_frequency_hz = 0.0;
  std::string event_id;
};

// H*S = dP * f_s / (2 |df/dt|)
inline InertiaEstimate inertia_from_rocof(double delta_p_mw, const RocofEstimate& rocof,
                                          double nominal_frequency_hz, double guard_hz_s = 1e-4,
                                          std::string event_id = {}) {
  const char* op = "inertia_from_rocof";
  if (!(delta_p_mw > 0.0)) throw Error("inertia-metrics", op, "power mismatch must be positive");
  if (!(nominal_frequency_hz > 0.0)) throw Error("inertia-metrics", op, "nominal frequency must be positive");
  const double magnitude = std::abs(rocof.value_hz_s);
  if (!(magnitude >= guard_hz_s)) {
    throw Error("inertia-metrics", op, "RoCoF below resolvable threshold");
  }
  return {delta_p_mw * nominal_frequency_hz / (2.0 * magnitude), rocof, delta_p_mw,
          nominal_frequency_hz, std::move(event_id)};
}

inline InertiaEstimate inertia_from_rocof(double delta_p_mw, double rocof_hz_s,
                                          double nominal_frequency_hz, double guard_hz_s = 1e-4) {
  RocofEstimate r;
  r.value_hz_s = rocof_hz_s;
  return inertia_from_rocof(delta_p_mw, r, nominal_frequency_hz, guard_hz_s);
}

inline constexpr double kRatioCrossCheckTolerance = 1e-9;

// h_region / h_intercon. Since dP and f_s cancel this must equal
// |rocof_intercon| / |rocof_region|; both forms are computed and compared.
inline double region_to_system_ratio(const InertiaEstimate& h_region,
                                     const InertiaEstimate& h_intercon) {
  const char* op = "region_to_system_ratio";
  if (h_region.event_id != h_intercon.event_id) {
    throw Error("inertia-metrics", op,
                "mismatched event ids '" + h_region.event_id + "' and '" + h_intercon.event_id + "'");
  }
  if (h_region.delta_p_mw != h_intercon.delta_p_mw ||
      h_region.nominal_frequency_hz != h_intercon.nominal_frequency_hz) {
    throw Error("inertia-metrics", op, "estimates use different power mismatch or nominal frequency");
  }
  const double quotient = h_region.h_times_s_mva_s / h_intercon.h_times_s_mva_s;
  const double rocof_form =
      std::abs(h_intercon.source_rocof.value_hz_s) / std::abs(h_region.source_rocof.value_hz_s);
  if (std::abs(quotient - rocof_form) > kRatioCrossCheckTolerance * std::max(1.0, rocof_form)) {
    throw Error("inertia-metrics", op, "inertia and RoCoF forms of the ratio disagree");
  }
  return quotient;
}

// Everything assemble_result needs; any empty slot is an assembly error.
struct EventComponents {
  std::optional<OnsetResult> region_onset;
  std::optional<OnsetResult> intercon_onset;
  std::optional<RocofEstimate> regional_rocof;
  std::optional<RocofEstimate> intercon_rocof;
  std::optional<LocalRocofSweep> local;
  std::optional<InertiaEstimate> h_region;
  std::optional<InertiaEstimate> h_intercon;
  std::optional<InertiaEstimate> h_local;
  Diagnostics diagnostics;
};

inline AnalysisResult assemble_result(const DisturbanceEvent& event, const EventComponents& c) {
  std::string missing;
  auto need = [&missing](bool present, const char* name) {
    if (!present) missing += (missing.empty() ? "" : ", ") + std::string(name);
  };
  need(c.region_onset.has_value(), "regional onset");
  need(c.intercon_onset.has_value(), "interconnection onset");
  need(c.regional_rocof.has_value(), "regional rocof");
  need(c.intercon_rocof.has_value(), "interconnection rocof");
  need(c.local.has_value(), "local rocof");
  need(c.h_region.has_value(), "regional inertia");
  need(c.h_intercon.has_value(), "interconnection inertia");
  need(c.h_local.has_value(), "local inertia");
  if (!missing.empty()) {
    throw Error("inertia-metrics", "assemble_result",
                "event " + event.event_id + " missing: " + missing);
  }

  AnalysisResult r;
  r.event_id = event.event_id;
  r.kind = event.kind;
  r.delta_p_mw = event.delta_p_mw;
  r.interconnection_rocof_hz_s = c.intercon_rocof->value_hz_s;
  r.regional_rocof_hz_s = c.regional_rocof->value_hz_s;
  r.local_rocof_hz_s = c.local->worst.value_hz_s;
  r.local_rocof_sensor = c.local->worst_sensor;
  for (const auto& [id, est] : c.local->per_sensor) r.per_sensor_rocof[id] = est.value_hz_s;
  r.h_intercon_mva_s = c.h_intercon->h_times_s_mva_s;
  r.h_region_mva_s = c.h_region->h_times_s_mva_s;
  r.h_local_mva_s = c.h_local->h_times_s_mva_s;
  r.region_to_system_ratio = region_to_system_ratio(*c.h_region, *c.h_intercon);
  r.onset_time_region = c.region_onset->onset_time;
  r.onset_time_intercon = c.intercon_onset->onset_time;
  r.diagnostics = c.diagnostics;
  r.arrival_time_s = arrival_time(*c.region_onset, *c.intercon_onset, r.diagnostics);
  r.diagnostics.insert(r.diagnostics.end(), c.local->diagnostics.begin(), c.local->diagnostics.end());

  const double sign = expected_sign(event.kind);
  const auto check_sign = [&](double value, const char* name) {
    if (value * sign < 0.0) {
      r.diagnostics.push_back(std::string("sign: ") + name + " RoCoF has the wrong sign for a " +
                              to_string(event.kind) + " event");
    }
  };
  check_sign(r.interconnection_rocof_hz_s, "interconnection");
  check_sign(r.regional_rocof_hz_s, "regional");
  check_sign(r.local_rocof_hz_s, "local");
  if (std::abs(r.local_rocof_hz_s) < std::abs(r.regional_rocof_hz_s)) {
    r.diagnostics.push_back("local RoCoF magnitude below regional RoCoF magnitude");
  }
  return r;
}

}  // namespace gridinertia
