#include "postshot/text.hpp"

#include <unicode/brkiter.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <algorithm>
#include <memory>

namespace postshot::text {

namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

// Decodes the code point starting at byte `i`; advances `i`. Invalid bytes
// decode as U+FFFD and advance one byte.
UChar32 next_code_point(std::string_view s, std::size_t& i) {
  int32_t pos = static_cast<int32_t>(i);
  UChar32 c;
  U8_NEXT(reinterpret_cast<const uint8_t*>(s.data()), pos, static_cast<int32_t>(s.size()), c);
  i = static_cast<std::size_t>(pos);
  return c < 0 ? 0xFFFD : c;
}

bool is_alnum_cp(UChar32 c) { return u_isalnum(c) != 0; }

}  // namespace

bool valid_utf8(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    int32_t pos = static_cast<int32_t>(i);
    UChar32 c;
    U8_NEXT(reinterpret_cast<const uint8_t*>(s.data()), pos, static_cast<int32_t>(s.size()), c);
    if (c < 0) return false;
    i = static_cast<std::size_t>(pos);
  }
  return true;
}

std::string to_lower_ascii(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : static_cast<char>(c);
  });
  return out;
}

std::string_view trim(std::string_view s) {
  std::size_t b = 0;
  while (b < s.size() && is_space(s[b])) ++b;
  std::size_t e = s.size();
  while (e > b && is_space(s[e - 1])) --e;
  return s.substr(b, e - b);
}

std::vector<std::string_view> split_whitespace(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_space(s[i])) ++i;
    std::size_t start = i;
    while (i < s.size() && !is_space(s[i])) ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

std::string normalize_token(std::string_view token) {
  // Find the first and last alphanumeric code points.
  std::size_t first = std::string_view::npos;
  std::size_t last_end = 0;
  std::size_t i = 0;
  while (i < token.size()) {
    std::size_t start = i;
    UChar32 c = next_code_point(token, i);
    if (is_alnum_cp(c)) {
      if (first == std::string_view::npos) first = start;
      last_end = i;
    }
  }
  if (first == std::string_view::npos) return {};
  std::string core(token.substr(first, last_end - first));
  icu::UnicodeString u = icu::UnicodeString::fromUTF8(core);
  u.toLower();
  std::string out;
  u.toUTF8String(out);
  return out;
}

std::string collapse_whitespace(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (auto piece : split_whitespace(s)) {
    if (!out.empty()) out.push_back(' ');
    out.append(piece);
  }
  return out;
}

std::string normalize_body(std::string_view s) {
  std::string kept;
  kept.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    std::size_t start = i;
    UChar32 c = next_code_point(s, i);
    if (is_alnum_cp(c)) {
      kept.append(s.substr(start, i - start));
    } else if (u_isUWhiteSpace(c) || c == '\t') {
      kept.push_back(' ');
    }
    // other punctuation and symbols are dropped
  }
  icu::UnicodeString u = icu::UnicodeString::fromUTF8(collapse_whitespace(kept));
  u.toLower();
  std::string out;
  u.toUTF8String(out);
  return out;
}

std::size_t code_point_count(std::string_view s) {
  std::size_t n = 0;
  std::size_t i = 0;
  while (i < s.size()) {
    next_code_point(s, i);
    ++n;
  }
  return n;
}

namespace {

// Byte offsets of every grapheme boundary in `s`, including 0 and s.size().
std::vector<std::size_t> grapheme_boundaries(std::string_view s) {
  std::vector<std::size_t> out{0};
  if (s.empty()) return out;
  UErrorCode status = U_ZERO_ERROR;
  std::unique_ptr<icu::BreakIterator> it(
      icu::BreakIterator::createCharacterInstance(icu::Locale::getRoot(), status));
  icu::UnicodeString u = icu::UnicodeString::fromUTF8(icu::StringPiece(s.data(), static_cast<int32_t>(s.size())));
  if (U_FAILURE(status)) {
    // Fall back to code point boundaries.
    std::size_t i = 0;
    while (i < s.size()) {
      next_code_point(s, i);
      out.push_back(i);
    }
    return out;
  }
  it->setText(u);
  // Map UTF-16 offsets back to UTF-8 byte offsets by walking both in step.
  std::size_t byte = 0;
  int32_t utf16 = 0;
  for (int32_t b = it->next(); b != icu::BreakIterator::DONE; b = it->next()) {
    while (utf16 < b && byte < s.size()) {
      UChar32 c = next_code_point(s, byte);
      utf16 += U16_LENGTH(c);
    }
    out.push_back(byte);
  }
  if (out.back() != s.size()) out.push_back(s.size());
  return out;
}

}  // namespace

std::size_t grapheme_count(std::string_view s) { return grapheme_boundaries(s).size() - 1; }

std::string prefix_without_split(std::string_view s, std::size_t max_code_points) {
  std::size_t limit = 0;  // byte offset after max_code_points code points
  std::size_t n = 0;
  while (limit < s.size() && n < max_code_points) {
    next_code_point(s, limit);
    ++n;
  }
  if (limit >= s.size()) return std::string(s);
  auto bounds = grapheme_boundaries(s);
  auto it = std::upper_bound(bounds.begin(), bounds.end(), limit);
  return std::string(s.substr(0, *std::prev(it)));
}

}  // namespace postshot::text
