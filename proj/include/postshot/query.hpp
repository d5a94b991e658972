#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "postshot/dates.hpp"
#include "postshot/grouping.hpp"

namespace postshot {

enum class QueryTarget { GeneralWeb, FactCheck, WebArchive };

inline constexpr QueryTarget kAllTargets[] = {QueryTarget::GeneralWeb, QueryTarget::FactCheck,
                                              QueryTarget::WebArchive};

std::string_view to_string(QueryTarget t);

// Searches work best on a short lead-in of the post text.
inline constexpr std::size_t kQueryPrefixLength = 50;

struct QuerySpec {
  std::string text_prefix;
  std::optional<std::string> handle;
  std::optional<CalendarDate> date;
  QueryTarget target = QueryTarget::GeneralWeb;

  bool operator==(const QuerySpec&) const = default;
};

// First kQueryPrefixLength code points of `body`, cut back to a grapheme
// boundary so no user-perceived character is split.
std::string query_prefix(std::string_view body);

/// One query per target from the unit's body text (recomputed from `doc`).
/// Throws Error{EmptyBody}.
std::vector<QuerySpec> build_queries(const PostUnit& unit, const OcrDocument& doc);

/// Same, from the unit's stored body (used for parse records read from disk).
std::vector<QuerySpec> build_queries(const PostUnit& unit);

// target<TAB>handle<TAB>date<TAB>text_prefix; absent fields are empty.
std::string format_query_line(const QuerySpec& q);

}  // namespace postshot
