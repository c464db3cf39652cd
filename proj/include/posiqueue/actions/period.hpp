#pragma once

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "posiqueue/corpus.hpp"
#include "posiqueue/error.hpp"

namespace posiqueue::actions {

enum class PeriodKind { weekly, monthly };

inline constexpr std::string_view to_token(PeriodKind p) { return p == PeriodKind::weekly ? "weekly" : "monthly"; }

inline std::optional<PeriodKind> parse_period_kind(std::string_view s) {
  if (s == "weekly" || s == "week") return PeriodKind::weekly;
  if (s == "monthly" || s == "month") return PeriodKind::monthly;
  return std::nullopt;
}

struct Period {
  std::int64_t start = 0;  // inclusive, epoch seconds
  std::int64_t end = 0;    // exclusive
  bool operator==(const Period&) const = default;
};

namespace period_detail {

inline std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  return (a % b != 0 && ((a < 0) != (b < 0))) ? q - 1 : q;
}

// Days since the epoch of the Monday on or before `day`. 1970-01-01 was a Thursday.
inline std::int64_t monday_on_or_before(std::int64_t day) {
  std::int64_t dow = ((day + 3) % 7 + 7) % 7;  // Monday = 0
  return day - dow;
}

inline std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
  using namespace std::chrono;
  return sys_days{year{y} / month{m} / day{d}}.time_since_epoch().count();
}

// Monday of ISO week 1 (the week containing January 4th).
inline std::int64_t iso_week1_monday(int y) { return monday_on_or_before(days_from_civil(y, 1, 4)); }

}  // namespace period_detail

/// Weekly periods start Monday 00:00 UTC; monthly periods on the 1st.
inline Period period_containing(std::int64_t ts, PeriodKind kind) {
  using namespace std::chrono;
  const std::int64_t day = period_detail::floor_div(ts, kSecondsPerDay);
  if (kind == PeriodKind::weekly) {
    std::int64_t start = period_detail::monday_on_or_before(day);
    return Period{start * kSecondsPerDay, (start + 7) * kSecondsPerDay};
  }
  year_month_day ymd{sys_days{days{day}}};
  sys_days first{ymd.year() / ymd.month() / 1};
  sys_days next{(ymd.year() / ymd.month() / 1) + months{1}};
  return Period{first.time_since_epoch().count() * kSecondsPerDay, next.time_since_epoch().count() * kSecondsPerDay};
}

inline std::string iso_date(std::int64_t ts) {
  using namespace std::chrono;
  year_month_day ymd{sys_days{days{period_detail::floor_div(ts, kSecondsPerDay)}}};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()));
  return buf;
}

/// Parses "YYYY-Www" (ISO week, weekly) or "YYYY-MM" (monthly).
inline std::pair<PeriodKind, Period> parse_period(std::string_view token) {
  auto bad = [&] { return Error(ErrorCode::invalid_argument, "unknown period \"" + std::string(token) + "\""); };
  auto digits = [](std::string_view s) {
    if (s.empty()) return -1;
    int v = 0;
    for (char c : s) {
      if (c < '0' || c > '9') return -1;
      v = v * 10 + (c - '0');
    }
    return v;
  };
  if (token.size() < 7 || token[4] != '-') throw bad();
  int y = digits(token.substr(0, 4));
  if (y < 1970) throw bad();
  if (token[5] == 'W') {
    int w = digits(token.substr(6));
    if (token.size() != 8 || w < 1) throw bad();
    std::int64_t week1 = period_detail::iso_week1_monday(y);
    std::int64_t weeks = (period_detail::iso_week1_monday(y + 1) - week1) / 7;
    if (w > weeks) throw bad();
    std::int64_t start = week1 + 7 * (w - 1);
    return {PeriodKind::weekly, Period{start * kSecondsPerDay, (start + 7) * kSecondsPerDay}};
  }
  int m = digits(token.substr(5));
  if (token.size() != 7 || m < 1 || m > 12) throw bad();
  return {PeriodKind::monthly,
          period_containing(period_detail::days_from_civil(y, static_cast<unsigned>(m), 1) * kSecondsPerDay,
                            PeriodKind::monthly)};
}

}  // namespace posiqueue::actions
