#pragma once

// Built-in consistency checks: seven embedded disturbance records
// (power mismatch + RoCoF -> inertia) and a fast synthetic round trip.

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "gridinertia/inertia.hpp"
#include "gridinertia/pipeline.hpp"
#include "gridinertia/report.hpp"
#include "gridinertia/synth.hpp"

namespace gridinertia {

// One published event row. RoCoF magnitudes in mHz/s, as published.
struct PublishedEvent {
  std::string label;
  double delta_p_mw;
  double intercon_rocof_mhz_s;
  double regional_rocof_mhz_s;
  double local_rocof_mhz_s;
  double h_intercon_mva_s;
  double h_region_mva_s;
  double h_local_mva_s;
  double arrival_time_s;
  double ratio_pct;
};

inline const std::vector<PublishedEvent>& published_caiso_events() {
  static const std::vector<PublishedEvent> events = {
      {"2013-07-10 09:49", 1130, 42, 207, 307, 815000, 164000, 110000, 0.2, 20.1},
      {"2014-02-02 12:29", 1450, 58, 261, 435, 502000, 167000, 100000, 0.2, 33.3},
      {"2017-10-09 12:14", 973, 104, 422, 1139, 280000, 69200, 25600, 0.2, 24.7},
      {"2018-12-01 11:06", 1114, 39, 227, 383, 860000, 147000, 85000, 0.2, 17.1},
      {"2021-10-15 17:49", 988, 34, 114, 178, 864000, 261000, 167000, 0.0, 30.2},
      {"2022-04-06 15:05", 794, 44, 157, 335, 536000, 152000, 71100, 0.1, 28.3},
      {"2024-08-31 00:36", 771, 27, 65, 133, 855083, 355850, 173910, 0.2, 41.6},
  };
  return events;
}

// Published RoCoFs are rounded to whole mHz/s, which bounds the relative
// error of the derived inertia at about 3%.
inline constexpr double kPublishedInertiaTolerance = 0.03;
inline constexpr double kPublishedRatioTolerancePct = 1.0;

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct PublishedEventInertia {
  InertiaEstimate intercon;
  InertiaEstimate region;
  InertiaEstimate local;
  double ratio = 0.0;
};

inline PublishedEventInertia inertia_for_published(const PublishedEvent& e, double nominal_hz = 60.0) {
  const auto estimate = [&](double mhz) {
    RocofEstimate r;
    r.value_hz_s = -from_mhz_per_s(mhz);
    return inertia_from_rocof(e.delta_p_mw, r, nominal_hz, 1e-4, e.label);
  };
  PublishedEventInertia out{estimate(e.intercon_rocof_mhz_s), estimate(e.regional_rocof_mhz_s),
                            estimate(e.local_rocof_mhz_s), 0.0};
  out.ratio = region_to_system_ratio(out.region, out.intercon);
  return out;
}

inline std::vector<CheckResult> published_inertia_checks(const std::vector<PublishedEvent>& events) {
  std::vector<CheckResult> out;
  char buf[160];
  for (const auto& e : events) {
    const PublishedEventInertia h = inertia_for_published(e);
    const auto rel_check = [&](const char* what, double computed, double published) {
      const double rel = std::abs(computed - published) / published;
      std::snprintf(buf, sizeof buf, "computed %.0f vs published %.0f MVA*s (%.2f%%)", computed, published,
                    100.0 * rel);
      out.push_back({e.label + " " + what, rel <= kPublishedInertiaTolerance, buf});
    };
    rel_check("H_intercon", h.intercon.h_times_s_mva_s, e.h_intercon_mva_s);
    rel_check("H_region", h.region.h_times_s_mva_s, e.h_region_mva_s);
    rel_check("H_local", h.local.h_times_s_mva_s, e.h_local_mva_s);
  }
  return out;
}

inline std::vector<CheckResult> published_ratio_checks(const std::vector<PublishedEvent>& events) {
  std::vector<CheckResult> out;
  char buf[160];
  for (const auto& e : events) {
    const double pct = 100.0 * inertia_for_published(e).ratio;
    std::snprintf(buf, sizeof buf, "computed %.1f%% vs published %.1f%%", pct, e.ratio_pct);
    out.push_back({e.label + " H_region/H_intercon",
                   std::abs(pct - e.ratio_pct) <= kPublishedRatioTolerancePct, buf});
  }
  return out;
}

// Noise-free synthetic event through the full pipeline; H*S within 1%.
inline CheckResult synthetic_round_trip_check() {
  SynthSpec spec;
  spec.true_h_mva_s = 500000.0;
  spec.delta_p_mw = 1000.0;
  spec.governor = {2000.0, 5.0};
  spec.sensors = default_sensor_layout(5, 2, 0.0);
  spec.seed = 7;
  CheckResult check{"synthetic round trip", false, {}};
  try {
    const SynthDataset ds = generate(spec);
    const EventAnalysis a = analyze_event(ds.bundle, ds.region.region, ds.event);
    const double rel = std::abs(a.result.h_region_mva_s - ds.truth.h_mva_s) / ds.truth.h_mva_s;
    char buf[160];
    std::snprintf(buf, sizeof buf, "H_region %.0f vs true %.0f MVA*s (%.3f%%)", a.result.h_region_mva_s,
                  ds.truth.h_mva_s, 100.0 * rel);
    check.detail = buf;
    check.passed = rel <= 0.01;
  } catch (const Error& e) {
    check.detail = e.what();
  }
  return check;
}

inline std::vector<CheckResult> run_selfcheck(const std::vector<PublishedEvent>& events) {
  std::vector<CheckResult> out = published_inertia_checks(events);
  const auto ratios = published_ratio_checks(events);
  out.insert(out.end(), ratios.begin(), ratios.end());
  out.push_back(synthetic_round_trip_check());
  return out;
}

}  // namespace gridinertia
