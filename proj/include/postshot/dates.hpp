#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace postshot {

struct CalendarDate {
  int year = 0;
  unsigned month = 0;
  unsigned day = 0;

  bool valid() const;
  std::string iso() const;  // YYYY-MM-DD
  static std::optional<CalendarDate> from_iso(std::string_view s);

  auto operator<=>(const CalendarDate&) const = default;
};

struct TimeOfDay {
  unsigned hour = 0;  // 0-23
  unsigned minute = 0;

  std::string hhmm() const;
  auto operator<=>(const TimeOfDay&) const = default;
};

// 00-69 -> 2000-2069, 70-99 -> 1970-1999.
int resolve_two_digit_year(int yy);

// Accepts full names and three-letter abbreviations ("sept" too), any case.
std::optional<unsigned> month_from_name(std::string_view name);

std::string_view month_abbrev(unsigned month);

}  // namespace postshot
