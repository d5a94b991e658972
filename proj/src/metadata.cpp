#include "postshot/metadata.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>

#include "postshot/error.hpp"
#include "postshot/text.hpp"

#ifndef POSTSHOT_DATA_DIR
#define POSTSHOT_DATA_DIR "data"
#endif

namespace postshot {

namespace fs = std::filesystem;

namespace {

constexpr const char* kMonth =
    "(jan(?:uary)?|feb(?:ruary)?|mar(?:ch)?|apr(?:il)?|may|june?|july?|aug(?:ust)?|"
    "sep(?:tember|t)?|oct(?:ober)?|nov(?:ember)?|dec(?:ember)?)";

// Separator glyphs between the time and the date; '-' and '.' are common
// OCR readings of the middle dot.
constexpr const char* kSeparator = "(?:·|•|-|\\.)";

constexpr const char* kEnd = "(?![0-9A-Za-z])";

DateFormat make_format(std::string name, std::string pattern, DateOrder order, bool with_time,
                       bool relative) {
  auto flags = std::regex::ECMAScript | std::regex::optimize;
  if (!relative) flags |= std::regex::icase;
  DateFormat f{std::move(name), pattern, order, with_time, relative, std::regex(pattern, flags)};
  return f;
}

std::map<std::string, DateFormat> builtin_formats() {
  std::map<std::string, DateFormat> out;
  const std::string month = kMonth;
  const std::string sep = kSeparator;
  const std::string end = kEnd;
  out.emplace("month_day_year",
              make_format("month_day_year",
                          "\\b(?:(\\d{1,2}):(\\d{2})\\s*([ap]\\.?m\\.?)\\s*" + sep + "?\\s*)?" +
                              month + "\\.?\\s+(\\d{1,2}),?\\s+(\\d{4})" + end,
                          DateOrder::MDY, true, false));
  out.emplace("day_month_year",
              make_format("day_month_year",
                          "\\b(\\d{1,2})\\s+" + month + "\\.?,?\\s+(\\d{4})" + end,
                          DateOrder::DMY, false, false));
  out.emplace("numeric_mdy",
              make_format("numeric_mdy", "\\b(\\d{1,2})/(\\d{1,2})/(\\d{4}|\\d{2})(?![0-9A-Za-z/])",
                          DateOrder::MDY, false, false));
  out.emplace("iso", make_format("iso", "\\b(\\d{4})-(\\d{2})-(\\d{2})" + end, DateOrder::YMD,
                                 false, false));
  out.emplace("relative",
              make_format("relative", "\\b(\\d{1,2})([smhd])" + end, DateOrder::MDY, false, true));
  return out;
}

std::vector<std::string> split_list(std::string_view value) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= value.size()) {
    std::size_t end = value.find(',', start);
    if (end == std::string_view::npos) end = value.size();
    auto item = text::trim(value.substr(start, end - start));
    if (!item.empty()) out.emplace_back(item);
    start = end + 1;
  }
  return out;
}

std::optional<DateOrder> parse_order(std::string_view s) {
  std::string l = text::to_lower_ascii(s);
  if (l == "ymd") return DateOrder::YMD;
  if (l == "mdy") return DateOrder::MDY;
  if (l == "dmy") return DateOrder::DMY;
  return std::nullopt;
}

}  // namespace

std::vector<std::string> ExtractorConfig::builtin_format_names() {
  return {"month_day_year", "day_month_year", "numeric_mdy", "iso", "relative"};
}

std::vector<std::string> ExtractorConfig::builtin_allowlist() {
  std::vector<std::string> out = {
      "january", "february", "march", "april",   "may",      "june",     "july",
      "august",  "september", "october", "november", "december", "jan",      "feb",
      "mar",     "apr",       "jun",     "jul",      "aug",      "sep",      "sept",
      "oct",     "nov",       "dec",     "monday",   "tuesday",  "wednesday", "thursday",
      "friday",  "saturday",  "sunday",  "mon",      "tue",      "wed",      "thu",
      "fri",     "sat",       "sun",     "am",       "pm",       "views",    "view",
      "likes",   "like",      "reposts", "repost",   "retweets", "retweet",  "quote",
      "quotes",  "replies",   "reply",   "bookmarks"};
  return out;
}

ExtractorConfig::ExtractorConfig() {
  auto all = builtin_formats();
  for (const auto& name : builtin_format_names()) formats_.push_back(all.at(name));
  for (auto& w : builtin_allowlist()) allowlist_.insert(std::move(w));
}

ExtractorConfig ExtractorConfig::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::FileNotFound, "cannot open extractor config: " + path.string());

  ExtractorConfig cfg;
  std::optional<std::vector<std::string>> enabled;
  std::map<std::string, DateFormat> custom;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto t = text::trim(line);
    if (t.empty() || t.front() == '#') continue;
    auto eq = t.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::InvalidConfig, "expected key = value", lineno);
    }
    std::string key(text::trim(t.substr(0, eq)));
    std::string_view value = text::trim(t.substr(eq + 1));
    if (key == "formats") {
      enabled = split_list(value);
    } else if (key.rfind("format.", 0) == 0) {
      std::string name = key.substr(7);
      auto bar = value.find('|');
      auto order = bar == std::string_view::npos ? std::nullopt : parse_order(value.substr(0, bar));
      if (name.empty() || !order) {
        throw Error(ErrorCode::InvalidConfig, "format entries are <ymd|mdy|dmy>|<regex>", lineno, key);
      }
      std::string pattern(value.substr(bar + 1));
      try {
        auto f = make_format(name, pattern, *order, false, false);
        if (f.compiled.mark_count() != 3) {
          throw Error(ErrorCode::InvalidConfig, "format regex needs exactly three groups", lineno, key);
        }
        custom.insert_or_assign(name, std::move(f));
      } catch (const std::regex_error& e) {
        throw Error(ErrorCode::InvalidConfig, std::string("bad regex: ") + e.what(), lineno, key);
      }
    } else if (key == "allowlist") {
      cfg.allowlist_.clear();
      for (auto& w : split_list(value)) cfg.allowlist_.insert(text::normalize_token(w));
    } else if (key == "allowlist.add") {
      for (auto& w : split_list(value)) cfg.allowlist_.insert(text::normalize_token(w));
    } else {
      throw Error(ErrorCode::InvalidConfig, "unknown key", lineno, key);
    }
  }

  if (enabled || !custom.empty()) {
    auto builtins = builtin_formats();
    std::vector<std::string> names = enabled ? *enabled : builtin_format_names();
    if (!enabled) {
      for (const auto& [name, _] : custom) names.push_back(name);
    }
    cfg.formats_.clear();
    for (const auto& name : names) {
      if (auto it = custom.find(name); it != custom.end()) {
        cfg.formats_.push_back(it->second);
      } else if (auto b = builtins.find(name); b != builtins.end()) {
        cfg.formats_.push_back(b->second);
      } else {
        throw Error(ErrorCode::InvalidConfig, "unknown date format: " + name, std::nullopt, "formats");
      }
    }
  }
  return cfg;
}

bool ExtractorConfig::exempt(std::string_view normalized_token) const {
  return allowlist_.count(std::string(normalized_token)) > 0;
}

const ExtractorConfig& default_extractor_config() {
  static const ExtractorConfig cfg;
  return cfg;
}

WordList::WordList(std::unordered_set<std::string> words, fs::path source)
    : words_(std::move(words)), source_(std::move(source)) {}

bool WordList::contains(std::string_view normalized_token) const {
  return words_.count(std::string(normalized_token)) > 0;
}

WordList load_wordlist(const fs::path& path, std::optional<std::size_t> top_n,
                       const ExtractorConfig& config) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::FileNotFound, "cannot open wordlist: " + path.string());
  std::unordered_set<std::string> words;
  std::string line;
  std::size_t read = 0;
  while ((!top_n || read < *top_n) && std::getline(in, line)) {
    ++read;
    auto t = text::trim(line);
    if (t.empty() || text::split_whitespace(t).size() != 1) continue;
    std::string w = text::to_lower_ascii(t);
    if (config.exempt(w)) continue;
    words.insert(std::move(w));
  }
  if (words.empty()) throw Error(ErrorCode::EmptyWordlist, "no usable tokens in " + path.string());
  return WordList(std::move(words), path);
}

fs::path default_wordlist_path() {
  return fs::path(POSTSHOT_DATA_DIR) / "wordlists" / "english-10000.txt";
}

namespace {

struct Candidate {
  std::size_t offset;
  std::size_t length;
  TimestampMention mention;
};

std::optional<int> to_int(const std::string& s) {
  int v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<CalendarDate> date_from_groups(const std::string& a, const std::string& b,
                                             const std::string& c, DateOrder order) {
  const std::string* ys = &a;
  const std::string* ms = &b;
  const std::string* ds = &c;
  switch (order) {
    case DateOrder::YMD: ys = &a, ms = &b, ds = &c; break;
    case DateOrder::MDY: ms = &a, ds = &b, ys = &c; break;
    case DateOrder::DMY: ds = &a, ms = &b, ys = &c; break;
  }
  auto year = to_int(*ys);
  auto day = to_int(*ds);
  std::optional<unsigned> month;
  if (auto m = to_int(*ms)) {
    if (*m >= 1 && *m <= 12) month = static_cast<unsigned>(*m);
  } else {
    month = month_from_name(*ms);
  }
  if (!year || !day || !month || *day < 1) return std::nullopt;
  int y = *year;
  if (ys->size() == 2) y = resolve_two_digit_year(y);
  else if (ys->size() != 4) return std::nullopt;
  CalendarDate d{y, *month, static_cast<unsigned>(*day)};
  if (!d.valid()) return std::nullopt;
  return d;
}

std::optional<TimeOfDay> time_from_groups(const std::string& h, const std::string& m,
                                          const std::string& ampm) {
  auto hour = to_int(h);
  auto minute = to_int(m);
  if (!hour || !minute || *hour < 1 || *hour > 12 || *minute < 0 || *minute > 59) {
    return std::nullopt;
  }
  bool pm = !ampm.empty() && (ampm[0] == 'p' || ampm[0] == 'P');
  unsigned h24 = static_cast<unsigned>(*hour % 12) + (pm ? 12u : 0u);
  return TimeOfDay{h24, static_cast<unsigned>(*minute)};
}

void collect_candidates(const std::string& line, std::size_t line_index, const DateFormat& fmt,
                        std::vector<Candidate>& out) {
  for (std::sregex_iterator it(line.begin(), line.end(), fmt.compiled), end; it != end; ++it) {
    const std::smatch& m = *it;
    TimestampMention tm;
    tm.line_index = line_index;
    auto offset = static_cast<std::size_t>(m.position(0));
    auto length = static_cast<std::size_t>(m.length(0));
    if (fmt.relative) {
      // "2h" must stand alone; "1.2m" is a count, not an age.
      if (offset > 0) {
        auto prev = static_cast<unsigned char>(line[offset - 1]);
        if (prev < 0x80 && !std::isspace(prev)) continue;
      }
      tm.relative = true;
    } else if (fmt.with_time) {
      auto date = date_from_groups(m.str(4), m.str(5), m.str(6), fmt.order);
      if (!date) continue;
      tm.date = date;
      if (m[1].matched) {
        tm.time = time_from_groups(m.str(1), m.str(2), m.str(3));
        if (!tm.time) {
          // Keep the date, drop the unparseable clock reading.
          std::size_t month_pos = static_cast<std::size_t>(m.position(4));
          length -= month_pos - offset;
          offset = month_pos;
        }
      }
    } else {
      auto date = date_from_groups(m.str(1), m.str(2), m.str(3), fmt.order);
      if (!date) continue;
      tm.date = date;
    }
    tm.char_offset = offset;
    tm.raw_text = line.substr(offset, length);
    out.push_back({offset, length, std::move(tm)});
  }
}

// Replaces [offset, offset+length) with spaces and reports whether any
// remaining token is a non-exempt common word.
bool line_has_common_word(const std::string& line, std::size_t offset, std::size_t length,
                          const WordList& words, const ExtractorConfig& config) {
  std::string rest = line;
  rest.replace(offset, length, std::string(length, ' '));
  for (auto tok : text::split_whitespace(rest)) {
    std::string t = text::normalize_token(tok);
    if (t.empty() || config.exempt(t)) continue;
    if (words.contains(t)) return true;
  }
  return false;
}

void check_range(const OcrDocument& doc, std::size_t line, std::size_t offset, std::size_t length) {
  if (line >= doc.size() || offset + length > doc.line(line).text.size()) {
    throw Error(ErrorCode::MentionOutOfRange,
                "mention at line " + std::to_string(line) + " offset " + std::to_string(offset) +
                    " does not fit the document");
  }
}

}  // namespace

std::vector<TimestampMention> find_timestamp_mentions(const OcrDocument& doc,
                                                      const ExtractorConfig& config) {
  std::vector<TimestampMention> out;
  for (const auto& line : doc.lines()) {
    std::vector<Candidate> cands;
    for (const auto& fmt : config.formats()) collect_candidates(line.text, line.index, fmt, cands);
    std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
      return a.offset != b.offset ? a.offset < b.offset : a.length > b.length;
    });
    std::size_t taken_until = 0;
    for (auto& c : cands) {
      if (c.offset < taken_until) continue;
      taken_until = c.offset + c.length;
      out.push_back(std::move(c.mention));
    }
  }
  return out;
}

std::vector<TimestampMention> filter_meaningful_dates(std::vector<TimestampMention> mentions,
                                                      const OcrDocument& doc, const WordList& words,
                                                      const ExtractorConfig& config) {
  for (auto& m : mentions) {
    check_range(doc, m.line_index, m.char_offset, m.raw_text.size());
    if (m.relative || !m.date) {
      m.meaningful = false;
      continue;
    }
    m.meaningful = !line_has_common_word(doc.line(m.line_index).text, m.char_offset,
                                         m.raw_text.size(), words, config);
  }
  return mentions;
}

bool is_handle_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
}

std::vector<HandleMention> find_handle_mentions(const OcrDocument& doc) {
  std::vector<HandleMention> out;
  for (const auto& line : doc.lines()) {
    const std::string& s = line.text;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] != '@') continue;
      if (i > 0 && !(s[i - 1] == ' ' || s[i - 1] == '\t')) continue;
      std::size_t j = i + 1;
      while (j < s.size() && is_handle_char(s[j])) ++j;
      std::size_t len = j - i - 1;
      if (len >= kMinHandleLength && len <= kMaxHandleLength) {
        out.push_back({s.substr(i + 1, len), line.index, i, false});
      }
      i = j - 1;
    }
  }
  return out;
}

std::vector<HandleMention> filter_author_handles(std::vector<HandleMention> mentions,
                                                 const OcrDocument& doc, const WordList& words,
                                                 const ExtractorConfig& config) {
  for (auto& m : mentions) {
    check_range(doc, m.line_index, m.char_offset, m.span_length());
    m.is_author = !line_has_common_word(doc.line(m.line_index).text, m.char_offset,
                                        m.span_length(), words, config);
  }
  return mentions;
}

}  // namespace postshot
