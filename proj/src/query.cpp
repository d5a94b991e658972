#include "postshot/query.hpp"

#include "postshot/error.hpp"
#include "postshot/text.hpp"

namespace postshot {

std::string_view to_string(QueryTarget t) {
  switch (t) {
    case QueryTarget::GeneralWeb: return "GeneralWeb";
    case QueryTarget::FactCheck: return "FactCheck";
    case QueryTarget::WebArchive: return "WebArchive";
  }
  return "GeneralWeb";
}

std::string query_prefix(std::string_view body) {
  return text::prefix_without_split(body, kQueryPrefixLength);
}

std::vector<QuerySpec> build_queries(const PostUnit& unit) {
  std::string body = text::collapse_whitespace(unit.body);
  if (body.empty()) throw Error(ErrorCode::EmptyBody, "unit has no text besides its metadata");
  std::string prefix = query_prefix(body);
  std::vector<QuerySpec> out;
  for (auto target : kAllTargets) {
    QuerySpec q;
    q.text_prefix = prefix;
    if (unit.author) q.handle = unit.author->handle;
    if (unit.timestamp) q.date = unit.timestamp->date;
    q.target = target;
    out.push_back(std::move(q));
  }
  return out;
}

std::vector<QuerySpec> build_queries(const PostUnit& unit, const OcrDocument& doc) {
  PostUnit copy = unit;
  copy.body = unit_body_text(unit, doc);
  return build_queries(copy);
}

std::string format_query_line(const QuerySpec& q) {
  std::string line(to_string(q.target));
  line += '\t';
  if (q.handle) line += *q.handle;
  line += '\t';
  if (q.date) line += q.date->iso();
  line += '\t';
  line += q.text_prefix;
  return line;
}

}  // namespace postshot
