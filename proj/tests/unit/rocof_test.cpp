#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "gridinertia/pipeline.hpp"
#include "gridinertia/report.hpp"
#include "gridinertia/rocof.hpp"
#include "gridinertia/synth.hpp"
#include "oracles.hpp"

using namespace gridinertia;

namespace {

constexpr double kT0 = 2000.0;

// Flat at 60 Hz for `lead` samples, then f(tau) for tau = (k - lead) * dt.
template <typename F>
FrequencyTrace shaped(std::size_t lead, std::size_t n, double dt, F f, std::string id = "S") {
  FrequencyTrace t{std::move(id), kT0, dt, std::vector<double>(n, 60.0)};
  for (std::size_t k = lead; k < n; ++k) t.samples[k] = f(static_cast<double>(k - lead) * dt);
  return t;
}

}  // namespace

TEST(PeakRocof, RampIsConstantInEveryWindow) {
  const auto tr = shaped(20, 40, 0.1, [](double tau) { return 60.0 - 0.1 * tau; });
  const double onset = kT0 + 2.0;
  const auto r = peak_rocof(tr, onset);
  EXPECT_NEAR(r.value_hz_s, -0.1, 1e-9);
  EXPECT_NEAR(r.window_start, onset, 1e-9);
  EXPECT_EQ(r.n_windows_evaluated, 5u);
  for (std::size_t s = 20; s < 25; ++s) {
    EXPECT_NEAR(oracle::slope(tr.samples, s, 2, 0.1), -0.1, 1e-9);
  }
}

TEST(PeakRocof, QuadraticPeaksInLastWindow) {
  const auto tr = shaped(20, 40, 0.1, [](double tau) { return 60.0 - 0.05 * tau * tau; });
  const auto r = peak_rocof(tr, kT0 + 2.0);
  EXPECT_NEAR(r.value_hz_s, -0.045, 1e-9);
  EXPECT_NEAR(r.window_start, kT0 + 2.4, 1e-9);
}

// Built with H*S = 771 * 60 / (2 * 0.065) so that the first-instant slope is
// -0.065 Hz/s; reported in mHz/s it must read -65.
TEST(PeakRocof, SyntheticEventReportsSixtyFiveMilliHertzPerSecond) {
  SynthSpec spec;
  spec.delta_p_mw = 771.0;
  spec.true_h_mva_s = 771.0 * 60.0 / (2.0 * 0.065);
  spec.sensors = default_sensor_layout(1, 1, 0.0);
  const auto ds = generate(spec);
  const auto a = analyze_event(ds.bundle, ds.region.region, ds.event);
  EXPECT_NEAR(to_mhz_per_s(a.result.regional_rocof_hz_s), -65.0, 0.5);
  EXPECT_EQ(std::lround(to_mhz_per_s(a.result.regional_rocof_hz_s)), -65);
}

TEST(PeakRocof, WindowCountFormula) {
  const auto tr = shaped(100, 400, 0.01, [](double tau) { return 60.0 - 0.2 * tau; });
  for (const auto& [window, horizon] : std::vector<std::pair<double, double>>{
           {0.1, 0.5}, {0.05, 0.5}, {0.1, 1.0}, {0.2, 0.3}, {0.02, 0.02}}) {
    const auto r = peak_rocof(tr, kT0 + 1.0, window, horizon);
    const auto expected = static_cast<std::size_t>(std::floor((horizon - window) / 0.01 + 1e-9)) + 1;
    EXPECT_EQ(r.n_windows_evaluated, expected) << window << " " << horizon;
    EXPECT_GE(r.window_start, kT0 + 1.0 - 1e-9);
    EXPECT_LE(r.window_start, kT0 + 1.0 + horizon - window + 1e-9);
  }
}

TEST(PeakRocof, Errors) {
  const auto tr = shaped(20, 24, 0.1, [](double tau) { return 60.0 - 0.1 * tau; });
  EXPECT_THROW(peak_rocof(tr, kT0 + 2.0), Error);  // horizon runs past the end
  auto gappy = shaped(20, 40, 0.1, [](double tau) { return 60.0 - 0.1 * tau; });
  gappy.samples[22] = kGap;
  EXPECT_THROW(peak_rocof(gappy, kT0 + 2.0), Error);
  EXPECT_THROW(peak_rocof(gappy, kT0 + 2.0, 0.01, 0.5), Error);  // < 2 samples per window
  try {
    peak_rocof(tr, kT0 + 2.0);
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("insufficient post-onset data"), std::string::npos);
  }
}

TEST(InterconnectionRocof, RingingSensorDoesNotMoveMedian) {
  const auto ramp = [](double tau) { return 60.0 - 0.12 * tau; };
  const auto a = shaped(50, 120, 0.1, ramp, "A");
  const auto b = shaped(50, 120, 0.1, ramp, "B");
  auto ringing = shaped(50, 120, 0.1, ramp, "C");
  for (std::size_t k = 0; k < ringing.size(); ++k) ringing.samples[k] += (k % 2 ? 0.5 : -0.5);

  const SystemConstants c;
  const auto clean = interconnection_frequency(make_bundle({a, b}));
  const auto noisy = interconnection_frequency(make_bundle({a, b, ringing}));
  const double onset = kT0 + 5.0;
  EXPECT_DOUBLE_EQ(interconnection_rocof(noisy, onset, c).value_hz_s,
                   interconnection_rocof(clean, onset, c).value_hz_s);
  EXPECT_NEAR(interconnection_rocof(noisy, onset, c).value_hz_s, -0.12, 1e-9);
}

TEST(InterconnectionRocof, SingleSensorEqualsPeakRocof) {
  const auto a = shaped(50, 120, 0.1, [](double tau) { return 60.0 - 0.05 * tau * tau; }, "A");
  const auto ic = interconnection_frequency(make_bundle({a}));
  EXPECT_DOUBLE_EQ(interconnection_rocof(ic, kT0 + 5.0, SystemConstants{}).value_hz_s,
                   peak_rocof(a, kT0 + 5.0).value_hz_s);
}

namespace {

TraceBundle slope_bundle(const std::vector<double>& slopes) {
  std::vector<FrequencyTrace> traces;
  for (std::size_t i = 0; i < slopes.size(); ++i) {
    const double m = slopes[i];
    traces.push_back(shaped(100, 200, 0.1, [m](double tau) { return 60.0 + m * tau; },
                            "S" + std::to_string(i)));
  }
  return make_bundle(std::move(traces));
}

RegionDefinition region_of(std::size_t n) {
  RegionDefinition r{"R", {}, {}};
  for (std::size_t i = 0; i < n; ++i) r.member_sensor_ids.push_back("S" + std::to_string(i));
  return r;
}

const TimeSpan kSearch{kT0 + 2.0, kT0 + 18.0};

}  // namespace

TEST(LocalRocofSweep, PicksSteepestSensor) {
  const auto sweep = local_rocof_sweep(slope_bundle({-0.3, -0.2, -0.1}), region_of(3), kSearch, {});
  EXPECT_EQ(sweep.worst_sensor, "S0");
  EXPECT_NEAR(sweep.worst.value_hz_s, -0.3, 1e-9);
  EXPECT_EQ(sweep.per_sensor.size(), 3u);
  EXPECT_NEAR(sweep.per_sensor.at("S2").value_hz_s, -0.1, 1e-9);
}

TEST(LocalRocofSweep, SingleAndIdenticalSensors) {
  const auto one = local_rocof_sweep(slope_bundle({-0.2}), region_of(1), kSearch, {});
  EXPECT_NEAR(one.worst.value_hz_s, -0.2, 1e-9);
  const auto twin = local_rocof_sweep(slope_bundle({-0.2, -0.2}), region_of(2), kSearch, {});
  EXPECT_DOUBLE_EQ(twin.per_sensor.at("S0").value_hz_s, twin.per_sensor.at("S1").value_hz_s);
  EXPECT_DOUBLE_EQ(std::abs(twin.worst.value_hz_s), std::abs(twin.per_sensor.at("S0").value_hz_s));
}

TEST(LocalRocofSweep, FailingSensorsAreReported) {
  auto bundle = slope_bundle({-0.2, 0.0});
  const auto sweep = local_rocof_sweep(bundle, {"R", {"S0", "S1", "S9"}, {}}, kSearch, {});
  EXPECT_EQ(sweep.per_sensor.size(), 1u);
  EXPECT_EQ(sweep.diagnostics.size(), 2u);
  EXPECT_THROW(local_rocof_sweep(bundle, {"R", {"S1"}, {}}, kSearch, {}), Error);
}

TEST(RocofProperty, PeakDominatesHorizonSlopeOnMonotoneTraces) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> step(0.0, 0.02);
  for (int trial = 0; trial < 1000; ++trial) {
    FrequencyTrace tr{"S", kT0, 0.1, std::vector<double>(30, 60.0)};
    for (std::size_t k = 11; k < tr.size(); ++k) tr.samples[k] = tr.samples[k - 1] - step(rng);
    const auto r = peak_rocof(tr, kT0 + 1.0);
    EXPECT_GE(std::abs(r.value_hz_s) + 1e-12, std::abs(oracle::slope(tr.samples, 10, 6, 0.1)));
  }
}

TEST(RocofProperty, ScaleEquivariance) {
  std::mt19937_64 rng(43);
  std::normal_distribution<double> wiggle(0.0, 0.01);
  std::uniform_real_distribution<double> scale(0.1, 4.0);
  for (int trial = 0; trial < 1000; ++trial) {
    FrequencyTrace tr{"S", kT0, 0.05, std::vector<double>(40)};
    for (auto& v : tr.samples) v = 60.0 + wiggle(rng);
    const double c = scale(rng);
    auto scaled = tr;
    for (auto& v : scaled.samples) v = 60.0 + c * (v - 60.0);
    const auto base = peak_rocof(tr, kT0 + 0.5);
    const auto s = peak_rocof(scaled, kT0 + 0.5);
    EXPECT_NEAR(s.value_hz_s, c * base.value_hz_s, 1e-9 * c);
  }
}

TEST(RocofProperty, SpatialOrderingOnSyntheticBundles) {
  std::mt19937_64 rng(47);
  std::uniform_real_distribution<double> h(2e5, 1e6);
  std::uniform_real_distribution<double> dp(500.0, 1500.0);
  for (int trial = 0; trial < 20; ++trial) {
    SynthSpec spec;
    spec.true_h_mva_s = h(rng);
    spec.delta_p_mw = dp(rng);
    spec.governor = {2000.0, 5.0};
    spec.sensors = default_sensor_layout(8, 3, 0.0);
    spec.sensors[1].slope_scale = 1.3;  // one member near the event
    const auto ds = generate(spec);
    const auto r = analyze_event(ds.bundle, ds.region.region, ds.event).result;
    EXPECT_GE(std::abs(r.local_rocof_hz_s), std::abs(r.regional_rocof_hz_s));
    EXPECT_GE(std::abs(r.regional_rocof_hz_s), std::abs(r.interconnection_rocof_hz_s));
  }
}
