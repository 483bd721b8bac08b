#pragma once

// Synthetic disturbance generator with known ground truth. The base
// frequency deviation d = f - f_s follows the swing equation with a
// first-order governor:
//
//   dd/dt = f_s / (2 H) * (dP_signed + P_gov)
//   dP_gov/dt = (-droop * d - P_gov) / T
//
// integrated by fixed-step RK4 at ten times the sample rate. Sensors see the
// base deviation delayed, scaled and with seeded white noise added.

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "gridinertia/ingest.hpp"
#include "gridinertia/timestamp.hpp"
#include "gridinertia/trace.hpp"

namespace gridinertia {

// Generation-trip sign convention: returns -dP * f_s / (2 H).
inline double rocof_from_inertia(double h_mva_s, double delta_p_mw, double nominal_frequency_hz) {
  if (!(h_mva_s > 0.0) || !(delta_p_mw > 0.0) || !(nominal_frequency_hz > 0.0)) {
    throw Error("synth", "rocof_from_inertia", "inputs must be positive");
  }
  return -delta_p_mw * nominal_frequency_hz / (2.0 * h_mva_s);
}

struct GovernorModel {
  double droop_mw_per_hz = 0.0;
  double time_constant_s = 5.0;
};

struct SynthSensor {
  std::string sensor_id;
  double delay_s = 0.0;
  double noise_std_hz = 0.0;
  double slope_scale = 1.0;
  bool in_region = true;
  double lat = 0.0;
  double lon = 0.0;
};

struct SynthSpec {
  double true_h_mva_s = 500000.0;
  double delta_p_mw = 1000.0;
  double f_s = 60.0;
  double onset_time = 10.0;  // seconds into the record
  double record_length_s = 20.0;
  double sample_rate = 10.0;
  GovernorModel governor;
  std::vector<SynthSensor> sensors;
  std::uint64_t seed = 0;
  EventKind kind = EventKind::kGenerationTrip;
  double start_time = 1735689600.0;  // 2025-01-01T00:00:00Z
  double onset_window_s = 0.5;
  std::string event_id = "SYNTH";
  std::string region_id = "REGION";
};

inline std::vector<std::string> validate_synth_spec(const SynthSpec& s) {
  std::vector<std::string> out;
  if (!(s.true_h_mva_s > 0.0)) out.push_back("true inertia must be > 0");
  if (!(s.delta_p_mw > 0.0)) out.push_back("power mismatch must be > 0");
  if (!(s.f_s > 0.0)) out.push_back("nominal frequency must be > 0");
  if (!(s.sample_rate > 0.0)) out.push_back("sample rate must be > 0");
  if (!(s.record_length_s > 0.0)) out.push_back("record length must be > 0");
  if (!(s.onset_time > 2.0 * s.onset_window_s && s.onset_time < s.record_length_s - 1.0)) {
    out.push_back("onset time must lie in (2 * onset window, record length - 1)");
  }
  if (!(s.governor.droop_mw_per_hz >= 0.0)) out.push_back("governor droop must be >= 0");
  if (!(s.governor.time_constant_s > 0.0)) out.push_back("governor time constant must be > 0");
  if (s.sensors.empty()) out.push_back("at least one sensor is required");
  std::set<std::string> ids;
  for (const auto& sensor : s.sensors) {
    if (sensor.sensor_id.empty()) out.push_back("sensor id must not be empty");
    if (!ids.insert(sensor.sensor_id).second) out.push_back("duplicate sensor " + sensor.sensor_id);
    if (!(sensor.delay_s >= 0.0)) out.push_back("sensor delay must be >= 0");
    if (!(sensor.noise_std_hz >= 0.0)) out.push_back("sensor noise must be >= 0");
    if (!(sensor.slope_scale > 0.0)) out.push_back("sensor slope scale must be > 0");
  }
  return out;
}

struct SensorTruth {
  std::string sensor_id;
  double onset_time = 0.0;           // absolute
  double initial_rocof_hz_s = 0.0;   // analytic first-instant slope
};

struct GroundTruth {
  double h_mva_s = 0.0;
  double delta_p_mw = 0.0;
  double onset_time = 0.0;  // absolute
  double initial_rocof_hz_s = 0.0;
  std::vector<SensorTruth> sensors;
};

struct SynthDataset {
  SynthSpec spec;
  TraceBundle bundle;
  RegionDescriptor region;
  DisturbanceEvent event;
  GroundTruth truth;
};

// Base deviation on the fine grid tau = m * step, m >= 0, tau measured from
// the onset.
inline std::vector<double> integrate_base_deviation(const SynthSpec& spec, double step, std::size_t count) {
  const double gain = spec.f_s / (2.0 * spec.true_h_mva_s);
  const double dp_signed = expected_sign(spec.kind) * spec.delta_p_mw;
  const double droop = spec.governor.droop_mw_per_hz;
  const double tc = spec.governor.time_constant_s;
  using State = std::array<double, 2>;  // {deviation, governor power}
  const auto rhs = [&](const State& y) -> State {
    return {gain * (dp_signed + y[1]), (-droop * y[0] - y[1]) / tc};
  };
  std::vector<double> out(count, 0.0);
  State y{0.0, 0.0};
  for (std::size_t m = 1; m < count; ++m) {
    const State k1 = rhs(y);
    const State k2 = rhs({y[0] + 0.5 * step * k1[0], y[1] + 0.5 * step * k1[1]});
    const State k3 = rhs({y[0] + 0.5 * step * k2[0], y[1] + 0.5 * step * k2[1]});
    const State k4 = rhs({y[0] + step * k3[0], y[1] + step * k3[1]});
    y[0] += step / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
    y[1] += step / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
    out[m] = y[0];
  }
  return out;
}

inline constexpr int kSynthOversampling = 10;

inline SynthDataset generate(const SynthSpec& spec) {
  const char* op = "generate";
  const auto problems = validate_synth_spec(spec);
  if (!problems.empty()) throw Error("synth", op, "invalid spec: " + problems.front());

  const double dt = 1.0 / spec.sample_rate;
  const double step = dt / kSynthOversampling;
  const auto n = static_cast<std::size_t>(std::floor(spec.record_length_s * spec.sample_rate + 1e-9)) + 1;
  const auto fine_count =
      static_cast<std::size_t>(std::ceil((spec.record_length_s - spec.onset_time) / step)) + 2;
  const std::vector<double> base = integrate_base_deviation(spec, step, fine_count);

  const auto deviation_at = [&](double tau) {
    if (tau <= 0.0) return 0.0;
    const double m = tau / step;
    const double mr = std::round(m);
    if (std::abs(m - mr) < 1e-6) return base[std::min(static_cast<std::size_t>(mr), fine_count - 1)];
    const auto lo = static_cast<std::size_t>(std::floor(m));
    if (lo + 1 >= fine_count) return base.back();
    const double w = m - static_cast<double>(lo);
    return base[lo] + w * (base[lo + 1] - base[lo]);
  };

  SynthDataset ds;
  ds.spec = spec;
  const double analytic = expected_sign(spec.kind) * spec.delta_p_mw * spec.f_s / (2.0 * spec.true_h_mva_s);
  ds.truth = {spec.true_h_mva_s, spec.delta_p_mw, spec.start_time + spec.onset_time, analytic, {}};

  std::vector<FrequencyTrace> traces;
  for (std::size_t i = 0; i < spec.sensors.size(); ++i) {
    const SynthSensor& sensor = spec.sensors[i];
    std::seed_seq seq{static_cast<std::uint32_t>(spec.seed & 0xffffffffu),
                      static_cast<std::uint32_t>(spec.seed >> 32), static_cast<std::uint32_t>(i)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> noise(0.0, 1.0);
    FrequencyTrace tr{sensor.sensor_id, spec.start_time, dt, std::vector<double>(n)};
    for (std::size_t k = 0; k < n; ++k) {
      const double tau = static_cast<double>(k) * dt - spec.onset_time - sensor.delay_s;
      double v = spec.f_s + sensor.slope_scale * deviation_at(tau);
      if (sensor.noise_std_hz > 0.0) v += sensor.noise_std_hz * noise(rng);
      tr.samples[k] = v;
    }
    if (!validate_trace(tr).empty()) {
      throw Error("synth", op, "invalid spec: sensor " + sensor.sensor_id +
                                   " leaves the [55, 65] Hz band; raise droop or shorten the record");
    }
    traces.push_back(std::move(tr));
    ds.truth.sensors.push_back({sensor.sensor_id, ds.truth.onset_time + sensor.delay_s,
                                sensor.slope_scale * analytic});
    ds.region.sensors.push_back({sensor.sensor_id, sensor.lat, sensor.lon, sensor.in_region});
    if (sensor.in_region) ds.region.region.member_sensor_ids.push_back(sensor.sensor_id);
  }
  ds.region.region.region_id = spec.region_id;
  ds.bundle = make_bundle(std::move(traces));
  attach_region_coverage(ds.bundle, ds.region.region);
  ds.event = {spec.event_id, spec.start_time + spec.onset_time, spec.delta_p_mw, spec.kind,
              spec.region_id};
  return ds;
}

// --- JSON -------------------------------------------------------------------

inline nlohmann::json to_json(const SynthSpec& s) {
  nlohmann::json sensors = nlohmann::json::array();
  for (const auto& x : s.sensors) {
    sensors.push_back({{"sensor_id", x.sensor_id},
                       {"delay_s", x.delay_s},
                       {"noise_std_hz", x.noise_std_hz},
                       {"slope_scale", x.slope_scale},
                       {"in_region", x.in_region},
                       {"lat", x.lat},
                       {"lon", x.lon}});
  }
  return {{"true_h_mva_s", s.true_h_mva_s},
          {"delta_p_mw", s.delta_p_mw},
          {"f_s", s.f_s},
          {"onset_time", s.onset_time},
          {"record_length_s", s.record_length_s},
          {"sample_rate", s.sample_rate},
          {"governor",
           {{"droop_mw_per_hz", s.governor.droop_mw_per_hz},
            {"time_constant_s", s.governor.time_constant_s}}},
          {"sensors", sensors},
          {"seed", s.seed},
          {"kind", to_string(s.kind)},
          {"start_time", format_iso8601(s.start_time)},
          {"onset_window_s", s.onset_window_s},
          {"event_id", s.event_id},
          {"region_id", s.region_id}};
}

inline SynthSpec synth_spec_from_json(const nlohmann::json& j) {
  try {
    SynthSpec s;
    s.true_h_mva_s = j.value("true_h_mva_s", s.true_h_mva_s);
    s.delta_p_mw = j.value("delta_p_mw", s.delta_p_mw);
    s.f_s = j.value("f_s", s.f_s);
    s.onset_time = j.value("onset_time", s.onset_time);
    s.record_length_s = j.value("record_length_s", s.record_length_s);
    s.sample_rate = j.value("sample_rate", s.sample_rate);
    if (j.contains("governor")) {
      s.governor.droop_mw_per_hz = j["governor"].value("droop_mw_per_hz", 0.0);
      s.governor.time_constant_s = j["governor"].value("time_constant_s", 5.0);
    }
    for (const auto& x : j.value("sensors", nlohmann::json::array())) {
      SynthSensor sensor;
      sensor.sensor_id = x.at("sensor_id").get<std::string>();
      sensor.delay_s = x.value("delay_s", 0.0);
      sensor.noise_std_hz = x.value("noise_std_hz", 0.0);
      sensor.slope_scale = x.value("slope_scale", 1.0);
      sensor.in_region = x.value("in_region", true);
      sensor.lat = x.value("lat", 0.0);
      sensor.lon = x.value("lon", 0.0);
      s.sensors.push_back(std::move(sensor));
    }
    s.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("kind")) s.kind = event_kind_from_string(j["kind"].get<std::string>());
    if (j.contains("start_time")) {
      const auto t = parse_iso8601(j["start_time"].get<std::string>());
      if (!t) throw Error("synth", "synth_spec_from_json", "bad start_time");
      s.start_time = *t;
    }
    s.onset_window_s = j.value("onset_window_s", s.onset_window_s);
    s.event_id = j.value("event_id", s.event_id);
    s.region_id = j.value("region_id", s.region_id);
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error("synth", "synth_spec_from_json", e.what());
  }
}

inline nlohmann::json to_json(const GroundTruth& g, const SynthSpec& spec) {
  nlohmann::json sensors = nlohmann::json::array();
  for (const auto& s : g.sensors) {
    sensors.push_back({{"sensor_id", s.sensor_id},
                       {"onset_time", format_iso8601(s.onset_time)},
                       {"initial_rocof_hz_s", s.initial_rocof_hz_s}});
  }
  return {{"spec", to_json(spec)},
          {"h_mva_s", g.h_mva_s},
          {"delta_p_mw", g.delta_p_mw},
          {"onset_time", format_iso8601(g.onset_time)},
          {"initial_rocof_hz_s", g.initial_rocof_hz_s},
          {"sensors", sensors}};
}

// Writes <sensor>.csv per trace plus region.json, event.json and
// ground_truth.json.
inline void write_dataset(const std::filesystem::path& dir, const SynthDataset& ds) {
  std::filesystem::create_directories(dir);
  for (const auto& [id, tr] : ds.bundle.traces) write_trace_csv(dir / (id + ".csv"), tr);
  write_json_file(dir / "region.json", to_json(ds.region));
  write_json_file(dir / "event.json", to_json(ds.event));
  write_json_file(dir / "ground_truth.json", to_json(ds.truth, ds.spec));
}

// Evenly spread default sensor layout used by the CLI and the tests:
// `in_region` sensors with no delay, then out-of-region sensors with growing
// delay and attenuation.
inline std::vector<SynthSensor> default_sensor_layout(std::size_t count, std::size_t in_region,
                                                      double noise_std_hz) {
  std::vector<SynthSensor> out;
  for (std::size_t i = 0; i < count; ++i) {
    SynthSensor s;
    char id[32];
    std::snprintf(id, sizeof id, "FDR%03zu", i + 1);
    s.sensor_id = id;
    s.noise_std_hz = noise_std_hz;
    s.in_region = i < in_region;
    if (!s.in_region) {
      const std::size_t j = i - in_region;
      s.delay_s = 0.1 * static_cast<double>(1 + j % 2);
      s.slope_scale = 0.5 / static_cast<double>(1 + j % 3);
    }
    s.lat = 34.0 + 0.5 * static_cast<double>(i);
    s.lon = -118.0 + 0.5 * static_cast<double>(i);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace gridinertia
