#include <gtest/gtest.h>

#include <cmath>

#include "gridinertia/pipeline.hpp"
#include "gridinertia/report.hpp"
#include "gridinertia/synth.hpp"

using namespace gridinertia;

namespace {

SynthDataset dataset(double noise = 0.0, std::uint64_t seed = 1) {
  SynthSpec spec;
  spec.true_h_mva_s = 400000.0;
  spec.delta_p_mw = 900.0;
  spec.governor = {2000.0, 5.0};
  spec.sensors = default_sensor_layout(9, 3, noise);
  spec.seed = seed;
  return generate(spec);
}

bool has_diag(const Diagnostics& d, const std::string& needle) {
  for (const auto& s : d) {
    if (s.find(needle) != std::string::npos) return true;
  }
  return false;
}

}  // namespace

TEST(AnalyzeEvent, FillsEveryMetric) {
  const auto ds = dataset();
  const auto r = analyze_event(ds.bundle, ds.region.region, ds.event).result;
  const std::vector<double> fields = {r.delta_p_mw,       r.interconnection_rocof_hz_s, r.regional_rocof_hz_s,
                                      r.local_rocof_hz_s, r.h_intercon_mva_s,           r.h_region_mva_s,
                                      r.h_local_mva_s,    r.arrival_time_s,             r.region_to_system_ratio};
  for (double f : fields) EXPECT_TRUE(std::isfinite(f));
  EXPECT_EQ(r.delta_p_mw, 900.0);
  EXPECT_LE(std::abs(r.h_region_mva_s - 400000.0) / 400000.0, 0.01);
  EXPECT_GT(r.h_intercon_mva_s, r.h_region_mva_s);
  EXPECT_GE(r.arrival_time_s, 0.0);
  EXPECT_NEAR(r.arrival_time_s / 0.1, std::round(r.arrival_time_s / 0.1), 1e-9);
  EXPECT_NEAR(r.region_to_system_ratio, r.h_region_mva_s / r.h_intercon_mva_s, 1e-12);
  EXPECT_EQ(r.per_sensor_rocof.size(), 3u);
  EXPECT_LT(r.regional_rocof_hz_s, 0.0);
}

TEST(AnalyzeEvent, FilterModesAndOrders) {
  const auto quiet = dataset();
  AnalysisOptions off;
  off.filter = FilterMode::kOff;
  AnalysisOptions on;
  on.filter = FilterMode::kOn;
  const auto a_off = analyze_event(quiet.bundle, quiet.region.region, quiet.event, off).result;
  const auto a_auto = analyze_event(quiet.bundle, quiet.region.region, quiet.event).result;
  const auto a_on = analyze_event(quiet.bundle, quiet.region.region, quiet.event, on).result;
  EXPECT_DOUBLE_EQ(a_off.h_region_mva_s, a_auto.h_region_mva_s);  // clean data: auto leaves it alone
  EXPECT_FALSE(has_diag(a_auto.diagnostics, "noise filter"));
  EXPECT_LE(std::abs(a_on.h_region_mva_s - a_off.h_region_mva_s) / a_off.h_region_mva_s, 0.02);

  // Filter and weighted mean are both linear, so the regional signal does not
  // depend on the order.
  AnalysisOptions late = on;
  late.filter_order = FilterOrder::kAfterAveraging;
  const auto a_late = analyze_event(quiet.bundle, quiet.region.region, quiet.event, late).result;
  EXPECT_NEAR(a_late.regional_rocof_hz_s, a_on.regional_rocof_hz_s, 1e-9);

  const auto noisy = dataset(0.02, 4);
  const auto n_auto = analyze_event(noisy.bundle, noisy.region.region, noisy.event);
  EXPECT_TRUE(has_diag(n_auto.result.diagnostics, "noise filter applied to FDR001"));
}

TEST(AnalyzeEvent, ApproxTimeOutsideSpan) {
  auto ds = dataset();
  ds.event.approx_time += 1e5;
  try {
    analyze_event(ds.bundle, ds.region.region, ds.event);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(std::string(e.module()), "trace-model");
  }
}

TEST(AnalyzeEvent, UnresolvableRocofNamesMetric) {
  SynthSpec spec;
  spec.true_h_mva_s = 1e12;
  spec.sensors = default_sensor_layout(3, 1, 0.0);
  const auto ds = generate(spec);
  try {
    analyze_event(ds.bundle, ds.region.region, ds.event);
    FAIL();
  } catch (const Error& e) {
    const std::string what = e.what();
    EXPECT_TRUE(what.find("RoCoF below resolvable threshold") != std::string::npos ||
                what.find("no onset found") != std::string::npos)
        << what;
  }
}

TEST(AnalyzeEvent, MissingRegionMembersAreDiagnosed) {
  const auto ds = dataset();
  RegionDefinition region = ds.region.region;
  region.member_sensor_ids.push_back("FDR999");
  TraceBundle bundle = ds.bundle;
  attach_region_coverage(bundle, region);
  const auto r = analyze_event(bundle, region, ds.event).result;
  EXPECT_TRUE(has_diag(r.diagnostics, "FDR999"));
}

TEST(Report, JsonRoundTripAndTables) {
  const auto ds = dataset();
  const auto r = analyze_event(ds.bundle, ds.region.region, ds.event).result;
  const auto back = result_from_json(result_to_json(r));
  EXPECT_NEAR(back.regional_rocof_hz_s, r.regional_rocof_hz_s, 1e-15);
  EXPECT_DOUBLE_EQ(back.h_region_mva_s, r.h_region_mva_s);
  EXPECT_NEAR(back.onset_time_region, r.onset_time_region, 1e-6);
  EXPECT_EQ(back.per_sensor_rocof.size(), r.per_sensor_rocof.size());

  const std::vector<TableEntry> entries = {{"A", r}, {"B", std::nullopt}};
  const auto rows = table_to_csv(entries, TableLayout::kRowPerEvent);
  EXPECT_EQ(rows.substr(0, rows.find('\n')),
            "event_id,power_mismatch_mw,interconnection_max_rocof_mhz_s,regional_rocof_mhz_s,"
            "local_rocof_mhz_s,h_intercon_mva_s,h_region_mva_s,h_local_mva_s,arrival_time_s,"
            "h_region_over_h_intercon_pct");
  EXPECT_NE(rows.find("\nB,,,,,,,,,\n"), std::string::npos);
  const auto cols = table_to_csv(entries, TableLayout::kColumnPerEvent);
  EXPECT_EQ(cols.substr(0, cols.find('\n')), "metric,A,B");
  EXPECT_EQ(std::count(cols.begin(), cols.end(), '\n'), 10);
}

TEST(Report, SeriesMarksOnsetsOnce) {
  const auto ds = dataset();
  const auto a = analyze_event(ds.bundle, ds.region.region, ds.event);
  const auto csv = series_to_csv(a.artifacts);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), static_cast<long>(a.artifacts.regional.size() + 1));
}
