#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "postshot/dates.hpp"
#include "postshot/ocr.hpp"

namespace postshot {

struct TimestampMention {
  std::string raw_text;
  std::optional<CalendarDate> date;  // absent for relative mentions ("2h")
  std::optional<TimeOfDay> time;
  bool relative = false;
  std::size_t line_index = 0;
  std::size_t char_offset = 0;  // byte offset into the line
  bool meaningful = false;

  bool operator==(const TimestampMention&) const = default;
};

struct HandleMention {
  std::string handle;  // without '@', case preserved
  std::size_t line_index = 0;
  std::size_t char_offset = 0;  // byte offset of '@'
  bool is_author = false;

  std::size_t span_length() const { return handle.size() + 1; }
  bool operator==(const HandleMention&) const = default;
};

// Field order of the three captured groups of a date pattern.
enum class DateOrder { YMD, MDY, DMY };

/// One recognizable date rendering. `pattern` captures year, month and day in
/// `order`; the month group may hold digits or a month name. Built-in
/// formats additionally capture an optional time of day.
struct DateFormat {
  std::string name;
  std::string pattern;
  DateOrder order = DateOrder::MDY;
  bool with_time = false;  // groups 1-3 are hour, minute, am/pm
  bool relative = false;   // groups 1-2 are amount and unit; no calendar date
  std::regex compiled;
};

/// Date grammar plus the chrome-word allowlist. Immutable once built.
class ExtractorConfig {
 public:
  ExtractorConfig();  // built-in formats and allowlist

  // Key-value file:
  //   formats = month_day_year, day_month_year, numeric_mdy, iso, relative
  //   format.<name> = <ymd|mdy|dmy>|<regex with three groups>
  //   allowlist = <comma separated>          (replaces the built-in list)
  //   allowlist.add = <comma separated>
  // '#' starts a comment. Throws Error{FileNotFound | InvalidConfig}.
  static ExtractorConfig load(const std::filesystem::path& path);

  static std::vector<std::string> builtin_format_names();
  static std::vector<std::string> builtin_allowlist();

  const std::vector<DateFormat>& formats() const { return formats_; }
  bool exempt(std::string_view normalized_token) const;
  const std::unordered_set<std::string>& allowlist() const { return allowlist_; }

 private:
  std::vector<DateFormat> formats_;
  std::unordered_set<std::string> allowlist_;
};

const ExtractorConfig& default_extractor_config();

/// Lowercase common-word set used to disqualify date and author lines.
class WordList {
 public:
  WordList() = default;
  WordList(std::unordered_set<std::string> words, std::filesystem::path source);

  bool contains(std::string_view normalized_token) const;
  std::size_t size() const { return words_.size(); }
  const std::filesystem::path& source_path() const { return source_; }
  const std::unordered_set<std::string>& words() const { return words_; }

 private:
  std::unordered_set<std::string> words_;
  std::filesystem::path source_;
};

/// Reads one token per line, keeping the first `top_n` lines when given, and
/// drops allowlisted tokens. Throws Error{FileNotFound | EmptyWordlist}.
WordList load_wordlist(const std::filesystem::path& path, std::optional<std::size_t> top_n = {},
                       const ExtractorConfig& config = default_extractor_config());

std::filesystem::path default_wordlist_path();

std::vector<TimestampMention> find_timestamp_mentions(
    const OcrDocument& doc, const ExtractorConfig& config = default_extractor_config());

std::vector<TimestampMention> filter_meaningful_dates(
    std::vector<TimestampMention> mentions, const OcrDocument& doc, const WordList& words,
    const ExtractorConfig& config = default_extractor_config());

std::vector<HandleMention> find_handle_mentions(const OcrDocument& doc);

std::vector<HandleMention> filter_author_handles(
    std::vector<HandleMention> mentions, const OcrDocument& doc, const WordList& words,
    const ExtractorConfig& config = default_extractor_config());

inline constexpr std::size_t kMinHandleLength = 4;
inline constexpr std::size_t kMaxHandleLength = 15;

bool is_handle_char(char c);

}  // namespace postshot
