#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

// UTF-8 helpers shared by the extractor, grouper and query builder.
namespace postshot::text {

bool valid_utf8(std::string_view s);

std::string to_lower_ascii(std::string_view s);

std::string_view trim(std::string_view s);

// Splits on ASCII whitespace; empty pieces are dropped.
std::vector<std::string_view> split_whitespace(std::string_view s);

// Strips leading and trailing non-alphanumeric code points and lowercases.
// "Views," -> "views", "@user_1" -> "user_1", "·" -> "".
std::string normalize_token(std::string_view token);

// Joins runs of whitespace into one space and trims both ends.
std::string collapse_whitespace(std::string_view s);

// Lowercase, punctuation dropped, whitespace collapsed. Used when comparing
// extracted bodies with annotated ones.
std::string normalize_body(std::string_view s);

std::size_t code_point_count(std::string_view s);
std::size_t grapheme_count(std::string_view s);

// Longest prefix of at most `max_code_points` code points that ends on a
// grapheme-cluster boundary.
std::string prefix_without_split(std::string_view s, std::size_t max_code_points);

}  // namespace postshot::text
