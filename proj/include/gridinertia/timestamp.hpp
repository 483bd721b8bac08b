#pragma once

// ISO-8601 UTC timestamps <-> absolute seconds since the Unix epoch.

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

namespace gridinertia {

namespace detail {

inline bool read_int(std::string_view s, std::size_t pos, std::size_t len, int& out) {
  if (pos + len > s.size()) return false;
  for (std::size_t i = pos; i < pos + len; ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
  }
  auto res = std::from_chars(s.data() + pos, s.data() + pos + len, out);
  return res.ec == std::errc{};
}

}  // namespace detail

// Accepts YYYY-MM-DDTHH:MM:SS[.fff...][Z|+00:00]. Returns nullopt on any
// syntax error or out-of-range field.
inline std::optional<double> parse_iso8601(std::string_view s) {
  using namespace std::chrono;
  int yy, mo, dd, hh, mi, ss;
  if (s.size() < 19) return std::nullopt;
  if (!detail::read_int(s, 0, 4, yy) || s[4] != '-' || !detail::read_int(s, 5, 2, mo) ||
      s[7] != '-' || !detail::read_int(s, 8, 2, dd) || (s[10] != 'T' && s[10] != ' ') ||
      !detail::read_int(s, 11, 2, hh) || s[13] != ':' || !detail::read_int(s, 14, 2, mi) ||
      s[16] != ':' || !detail::read_int(s, 17, 2, ss)) {
    return std::nullopt;
  }
  const year_month_day ymd{year{yy}, month{static_cast<unsigned>(mo)},
                           day{static_cast<unsigned>(dd)}};
  if (!ymd.ok() || hh > 23 || mi > 59 || ss > 60) return std::nullopt;

  std::size_t pos = 19;
  double frac = 0.0;
  if (pos < s.size() && s[pos] == '.') {
    ++pos;
    double scale = 0.1;
    const std::size_t digits_start = pos;
    while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') {
      frac += scale * (s[pos] - '0');
      scale *= 0.1;
      ++pos;
    }
    if (pos == digits_start) return std::nullopt;
  }
  const std::string_view zone = s.substr(pos);
  if (!(zone.empty() || zone == "Z" || zone == "+00:00")) return std::nullopt;

  const auto days = sys_days{ymd}.time_since_epoch().count();
  const double whole = static_cast<double>(days) * 86400.0 + hh * 3600.0 + mi * 60.0 + ss;
  return whole + frac;
}

// Formats with microsecond resolution, trailing zeros trimmed (at least one
// fractional digit is kept).
inline std::string format_iso8601(double t) {
  using namespace std::chrono;
  const std::int64_t micros = std::llround(t * 1e6);
  std::int64_t secs = micros / 1000000;
  std::int64_t frac = micros % 1000000;
  if (frac < 0) {
    frac += 1000000;
    secs -= 1;
  }
  std::int64_t days = secs / 86400;
  std::int64_t rem = secs % 86400;
  if (rem < 0) {
    rem += 86400;
    days -= 1;
  }
  const year_month_day ymd{sys_days{std::chrono::days{days}}};
  char frac_buf[8];
  std::snprintf(frac_buf, sizeof frac_buf, "%06lld", static_cast<long long>(frac));
  std::string frac_str(frac_buf);
  while (frac_str.size() > 1 && frac_str.back() == '0') frac_str.pop_back();

  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02lld:%02lld:%02lld.%sZ",
                static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()), static_cast<long long>(rem / 3600),
                static_cast<long long>((rem % 3600) / 60), static_cast<long long>(rem % 60),
                frac_str.c_str());
  return buf;
}

}  // namespace gridinertia
