#include "postshot/grouping.hpp"

#include <algorithm>
#include <tuple>

#include "postshot/text.hpp"

namespace postshot {

std::string_view to_string(ParseFlag f) {
  switch (f) {
    case ParseFlag::CountsMismatch: return "CountsMismatch";
    case ParseFlag::NoAuthors: return "NoAuthors";
    case ParseFlag::NoDates: return "NoDates";
    case ParseFlag::EmptyDocument: return "EmptyDocument";
  }
  return "";
}

std::optional<ParseFlag> parse_flag(std::string_view name) {
  for (auto f : {ParseFlag::CountsMismatch, ParseFlag::NoAuthors, ParseFlag::NoDates,
                 ParseFlag::EmptyDocument}) {
    if (to_string(f) == name) return f;
  }
  return std::nullopt;
}

namespace {

template <typename Mention>
void sort_by_position(std::vector<Mention>& v) {
  std::stable_sort(v.begin(), v.end(), [](const Mention& a, const Mention& b) {
    return std::tie(a.line_index, a.char_offset) < std::tie(b.line_index, b.char_offset);
  });
}

// True when nothing but separators remains once the handle is removed.
bool is_bare_handle_line(const std::string& line, const HandleMention& h) {
  std::string rest = line;
  rest.replace(h.char_offset, h.span_length(), std::string(h.span_length(), ' '));
  for (auto tok : text::split_whitespace(rest)) {
    if (!text::normalize_token(tok).empty()) return false;
  }
  return true;
}

}  // namespace

std::string unit_body_text(const PostUnit& unit, const OcrDocument& doc) {
  std::string joined;
  for (std::size_t i = unit.span.first_line; i <= unit.span.last_line && i < doc.size(); ++i) {
    if (unit.author && unit.author->line_index == i) continue;
    if (unit.timestamp && unit.timestamp->line_index == i) continue;
    if (unit.name_line && *unit.name_line == i) continue;
    joined += doc.line(i).text;
    joined.push_back(' ');
  }
  return text::collapse_whitespace(joined);
}

ScreenshotParse group_posts(const OcrDocument& doc, std::vector<HandleMention> handles,
                            std::vector<TimestampMention> dates) {
  ScreenshotParse parse;
  parse.screenshot_id = doc.screenshot_id();
  sort_by_position(handles);
  sort_by_position(dates);

  std::vector<HandleMention> authors;
  for (const auto& h : handles) {
    if (!h.is_author || h.line_index >= doc.size()) continue;
    // one author per line; later handles on the same line stay plain mentions
    if (!authors.empty() && authors.back().line_index == h.line_index) continue;
    authors.push_back(h);
  }
  std::vector<TimestampMention> meaningful;
  for (const auto& d : dates) {
    if (d.meaningful && d.date && d.line_index < doc.size()) meaningful.push_back(d);
  }

  if (doc.empty()) {
    parse.flags = {ParseFlag::EmptyDocument, ParseFlag::NoAuthors, ParseFlag::NoDates};
    return parse;
  }
  parse.date_count = meaningful.size();
  const std::size_t last = doc.size() - 1;

  if (authors.empty()) {
    PostUnit unit;
    unit.span = {0, last};
    parse.units.push_back(std::move(unit));
  } else {
    auto line_has_mention = [&](std::size_t line) {
      auto on_line = [line](const auto& m) { return m.line_index == line; };
      return std::any_of(handles.begin(), handles.end(), on_line) ||
             std::any_of(dates.begin(), dates.end(), on_line);
    };
    std::vector<std::size_t> starts;
    for (std::size_t k = 0; k < authors.size(); ++k) {
      const auto& a = authors[k];
      PostUnit unit;
      unit.author = a;
      std::size_t start = a.line_index;
      if (a.line_index > 0 && is_bare_handle_line(doc.line(a.line_index).text, a)) {
        std::size_t above = a.line_index - 1;
        bool after_previous = k == 0 || above > authors[k - 1].line_index;
        if (after_previous && !text::trim(doc.line(above).text).empty() &&
            !line_has_mention(above)) {
          unit.name_line = above;
          start = above;
        }
      }
      starts.push_back(k == 0 ? 0 : start);
      parse.units.push_back(std::move(unit));
    }
    for (std::size_t k = 0; k < parse.units.size(); ++k) {
      std::size_t end = k + 1 < starts.size() ? starts[k + 1] - 1 : last;
      parse.units[k].span = {starts[k], end};
    }
  }

  for (const auto& d : meaningful) {
    for (auto& unit : parse.units) {
      if (unit.span.contains(d.line_index)) {
        unit.dates.push_back(d);
        break;
      }
    }
  }

  std::set<std::string> distinct;
  for (auto& unit : parse.units) {
    if (!unit.dates.empty()) unit.timestamp = unit.dates.front();
    for (std::size_t i = unit.span.first_line; i <= unit.span.last_line; ++i) {
      unit.body_lines.push_back(i);
    }
    unit.body = unit_body_text(unit, doc);
    if (unit.author) distinct.insert(text::to_lower_ascii(unit.author->handle));
  }
  parse.author_count_distinct = distinct.size();

  if (authors.empty()) parse.flags.insert(ParseFlag::NoAuthors);
  if (parse.date_count == 0) parse.flags.insert(ParseFlag::NoDates);
  if (parse.date_count != authors.size()) parse.flags.insert(ParseFlag::CountsMismatch);
  return parse;
}

}  // namespace postshot
