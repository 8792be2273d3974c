#pragma once

#include <cstdint>
#include <string>

#include "entroclust/errors.hpp"

namespace entroclust {

namespace detail {

// Days since 1970-01-01 for a proleptic Gregorian date (Howard Hinnant's
// days_from_civil).
inline std::int64_t days_from_civil(std::int64_t y, std::int64_t m, std::int64_t d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const std::int64_t yoe = y - era * 400;
  const std::int64_t doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const std::int64_t doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + doe - 719468;
}

inline bool parse_fixed_digits(const std::string& s, std::size_t pos, int count,
                               std::int64_t* out) {
  std::int64_t v = 0;
  for (int i = 0; i < count; ++i) {
    if (pos + i >= s.size() || s[pos + i] < '0' || s[pos + i] > '9') return false;
    v = v * 10 + (s[pos + i] - '0');
  }
  *out = v;
  return true;
}

}  // namespace detail

// Parses an RFC-3339 timestamp ("2023-01-05T10:30:00.250+01:00", 'Z' or no
// offset accepted) into microseconds since the Unix epoch. Sub-microsecond
// digits are truncated.
inline std::int64_t parse_rfc3339_micros(const std::string& s) {
  using detail::parse_fixed_digits;
  std::int64_t year, month, day, hour, minute, second;
  auto fail = [&]() -> std::int64_t {
    throw ParseError("invalid timestamp \"" + s + "\" (expected RFC-3339)");
  };
  if (!parse_fixed_digits(s, 0, 4, &year)) return fail();
  if (s.size() < 10 || s[4] != '-' || s[7] != '-') return fail();
  if (!parse_fixed_digits(s, 5, 2, &month)) return fail();
  if (!parse_fixed_digits(s, 8, 2, &day)) return fail();
  if (month < 1 || month > 12 || day < 1 || day > 31) return fail();

  hour = minute = second = 0;
  std::int64_t micros = 0;
  std::int64_t offset_seconds = 0;
  std::size_t pos = 10;
  if (pos < s.size()) {
    if (s[pos] != 'T' && s[pos] != 't' && s[pos] != ' ') return fail();
    ++pos;
    if (!parse_fixed_digits(s, pos, 2, &hour)) return fail();
    if (pos + 2 >= s.size() || s[pos + 2] != ':') return fail();
    if (!parse_fixed_digits(s, pos + 3, 2, &minute)) return fail();
    if (pos + 5 >= s.size() || s[pos + 5] != ':') return fail();
    if (!parse_fixed_digits(s, pos + 6, 2, &second)) return fail();
    if (hour > 23 || minute > 59 || second > 60) return fail();
    pos += 8;
    if (pos < s.size() && s[pos] == '.') {
      ++pos;
      std::int64_t scale = 100000;
      bool any = false;
      while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') {
        if (scale > 0) micros += (s[pos] - '0') * scale;
        scale /= 10;
        ++pos;
        any = true;
      }
      if (!any) return fail();
    }
    if (pos < s.size()) {
      char c = s[pos];
      if (c == 'Z' || c == 'z') {
        ++pos;
      } else if (c == '+' || c == '-') {
        std::int64_t oh, om;
        if (!parse_fixed_digits(s, pos + 1, 2, &oh)) return fail();
        std::size_t mpos = pos + 3;
        if (mpos < s.size() && s[mpos] == ':') ++mpos;
        if (!parse_fixed_digits(s, mpos, 2, &om)) return fail();
        offset_seconds = (oh * 3600 + om * 60) * (c == '+' ? 1 : -1);
        pos = mpos + 2;
      } else {
        return fail();
      }
    }
    if (pos != s.size()) return fail();
  }

  std::int64_t days = detail::days_from_civil(year, month, day);
  std::int64_t secs = days * 86400 + hour * 3600 + minute * 60 + second - offset_seconds;
  return secs * 1000000 + micros;
}

}  // namespace entroclust
