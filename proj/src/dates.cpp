#include "postshot/dates.hpp"

#include <array>
#include <charconv>
#include <chrono>
#include <cstdio>

#include "postshot/text.hpp"

namespace postshot {

bool CalendarDate::valid() const {
  using namespace std::chrono;
  return year_month_day{std::chrono::year{year}, std::chrono::month{month}, std::chrono::day{day}}.ok();
}

std::string CalendarDate::iso() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", year, month, day);
  return buf;
}

std::optional<CalendarDate> CalendarDate::from_iso(std::string_view s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
  CalendarDate d;
  auto parse = [](std::string_view part, auto& out) {
    auto [p, ec] = std::from_chars(part.data(), part.data() + part.size(), out);
    return ec == std::errc{} && p == part.data() + part.size();
  };
  if (!parse(s.substr(0, 4), d.year) || !parse(s.substr(5, 2), d.month) ||
      !parse(s.substr(8, 2), d.day) || !d.valid()) {
    return std::nullopt;
  }
  return d;
}

std::string TimeOfDay::hhmm() const {
  char buf[8];
  std::snprintf(buf, sizeof buf, "%02u:%02u", hour, minute);
  return buf;
}

int resolve_two_digit_year(int yy) { return yy < 70 ? 2000 + yy : 1900 + yy; }

namespace {
constexpr std::array<std::string_view, 12> kAbbrev = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                                      "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
constexpr std::array<std::string_view, 12> kFull = {
    "january", "february", "march",     "april",   "may",      "june",
    "july",    "august",   "september", "october", "november", "december"};
}  // namespace

std::optional<unsigned> month_from_name(std::string_view name) {
  std::string lower = text::to_lower_ascii(name);
  if (!lower.empty() && lower.back() == '.') lower.pop_back();
  if (lower == "sept") return 9u;
  for (unsigned i = 0; i < 12; ++i) {
    if (lower == kFull[i] || lower == text::to_lower_ascii(kAbbrev[i])) return i + 1;
  }
  return std::nullopt;
}

std::string_view month_abbrev(unsigned month) {
  return (month >= 1 && month <= 12) ? kAbbrev[month - 1] : std::string_view{};
}

}  // namespace postshot
