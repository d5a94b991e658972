#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "postshot/metadata.hpp"
#include "postshot/ocr.hpp"
#include "postshot/structure.hpp"

namespace postshot {

struct LineSpan {
  std::size_t first_line = 0;
  std::size_t last_line = 0;  // inclusive

  bool contains(std::size_t line) const { return line >= first_line && line <= last_line; }
  bool operator==(const LineSpan&) const = default;
};

/// One post inside a screenshot.
struct PostUnit {
  std::optional<HandleMention> author;  // absent only for the NoAuthors unit
  std::optional<TimestampMention> timestamp;
  std::vector<TimestampMention> dates;  // every meaningful date inside the span
  // Display-name line directly above a bare "@handle" line.
  std::optional<std::size_t> name_line;
  std::vector<std::size_t> body_lines;  // every line of the span
  LineSpan span;
  // Span text minus the author, timestamp and name lines, whitespace collapsed.
  std::string body;

  bool operator==(const PostUnit&) const = default;
};

enum class ParseFlag { CountsMismatch, NoAuthors, NoDates, EmptyDocument };

std::string_view to_string(ParseFlag f);
std::optional<ParseFlag> parse_flag(std::string_view name);

struct ScreenshotParse {
  std::string screenshot_id;
  std::vector<PostUnit> units;
  std::size_t date_count = 0;
  std::size_t author_count_distinct = 0;
  std::set<ParseFlag> flags;
  // Filled in by the classifier.
  InternalStructure structure = InternalStructure::Indeterminate;
  bool date_free = false;

  bool has(ParseFlag f) const { return flags.count(f) > 0; }
  bool operator==(const ScreenshotParse&) const = default;
};

/// Splits `doc` into per-post units at author lines. The first unit also owns
/// every line above the first author; the last runs to the end of the
/// document. Non-author handles and non-meaningful dates are ignored, so
/// callers may pass the raw filtered mention lists. Degenerate input yields
/// flags, never an exception.
ScreenshotParse group_posts(const OcrDocument& doc, std::vector<HandleMention> handles,
                            std::vector<TimestampMention> dates);

std::string unit_body_text(const PostUnit& unit, const OcrDocument& doc);

}  // namespace postshot
