#include <gtest/gtest.h>

#include <random>

#include "gridinertia/timestamp.hpp"
#include "gridinertia/trace.hpp"

using namespace gridinertia;

namespace {

FrequencyTrace make_trace(std::vector<double> samples, double dt = 0.1) {
  return FrequencyTrace{"S1", 1000.0, dt, std::move(samples)};
}

}  // namespace

TEST(ValidateTrace, AcceptsValidTrace) {
  EXPECT_TRUE(validate_trace(make_trace({60.0, 59.99, 60.01})).empty());
}

TEST(ValidateTrace, FlagsOutOfBandSampleWithIndex) {
  const auto v = validate_trace(make_trace({60.0, 60.0, 70.0, 60.0}));
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].rule, TraceRule::kBand);
  EXPECT_EQ(v[0].index, 2u);
}

TEST(ValidateTrace, FlagsShortTrace) {
  const auto v = validate_trace(make_trace({60.0}));
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].rule, TraceRule::kLength);
}

TEST(ValidateTrace, GapsAreNotBandViolations) {
  EXPECT_TRUE(validate_trace(make_trace({60.0, kGap, 60.0})).empty());
}

TEST(ValidateTrace, FlagsNonPositiveInterval) {
  const auto v = validate_trace(make_trace({60.0, 60.0}, 0.0));
  ASSERT_FALSE(v.empty());
  EXPECT_EQ(v[0].rule, TraceRule::kSampleInterval);
}

TEST(ValidateRegion, Rules) {
  EXPECT_FALSE(validate_region({"R", {}, {}}).empty());
  EXPECT_FALSE(validate_region({"R", {"a", "a"}, {}}).empty());
  EXPECT_FALSE(validate_region({"R", {"a", "b"}, {0.5}}).empty());
  EXPECT_FALSE(validate_region({"R", {"a", "b"}, {0.7, 0.4}}).empty());
  EXPECT_FALSE(validate_region({"R", {"a", "b"}, {1.2, -0.2}}).empty());
  EXPECT_TRUE(validate_region({"R", {"a", "b"}, {0.75, 0.25}}).empty());
  EXPECT_TRUE(validate_region({"R", {"a"}, {}}).empty());
}

TEST(EventKind, SignAndNames) {
  EXPECT_EQ(expected_sign(EventKind::kGenerationTrip), -1.0);
  EXPECT_EQ(expected_sign(EventKind::kLoadLoss), 1.0);
  EXPECT_EQ(event_kind_from_string("load_loss"), EventKind::kLoadLoss);
  EXPECT_THROW(event_kind_from_string("islanding"), Error);
}

TEST(SystemConstants, DefaultsAreValid) {
  const SystemConstants c;
  EXPECT_EQ(c.nominal_frequency_hz, 60.0);
  EXPECT_EQ(c.rocof_window_s, 0.1);
  EXPECT_EQ(c.rocof_horizon_s, 0.5);
  EXPECT_EQ(c.onset_window_s, 0.5);
  EXPECT_EQ(c.min_rocof_hz_per_s, 1e-4);
  EXPECT_TRUE(validate_constants(c).empty());
  SystemConstants bad;
  bad.rocof_window_s = 0.6;
  EXPECT_FALSE(validate_constants(bad).empty());
}

TEST(Timestamp, ParsesFractionalUtc) {
  const auto t = parse_iso8601("2024-08-31T07:36:00.1Z");
  ASSERT_TRUE(t);
  EXPECT_NEAR(*t, 1725089760.1, 1e-6);
  EXPECT_FALSE(parse_iso8601("2024-13-31T07:36:00Z"));
  EXPECT_FALSE(parse_iso8601("2024-08-31T07:36:00.Z"));
  EXPECT_FALSE(parse_iso8601("yesterday"));
  EXPECT_FALSE(parse_iso8601("2024-08-31T07:36:00+02:00"));
}

TEST(Timestamp, FormatParseRoundTripAtMicrosecondResolution) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<long long> micros(0, 4102444800LL * 1000000LL);
  for (int i = 0; i < 2000; ++i) {
    const double t = static_cast<double>(micros(rng)) / 1e6;
    const auto back = parse_iso8601(format_iso8601(t));
    ASSERT_TRUE(back);
    EXPECT_NEAR(*back, t, 1e-6);
  }
  EXPECT_EQ(format_iso8601(1735689600.0), "2025-01-01T00:00:00.0Z");
  EXPECT_EQ(format_iso8601(1735689600.25), "2025-01-01T00:00:00.25Z");
}
