#include "postshot/structure.hpp"

#include "postshot/grouping.hpp"

namespace postshot {

std::string_view to_string(InternalStructure s) {
  switch (s) {
    case InternalStructure::P1A1: return "P1A1";
    case InternalStructure::P1An: return "P1An";
    case InternalStructure::PnA1: return "PnA1";
    case InternalStructure::PnAn: return "PnAn";
    case InternalStructure::Indeterminate: return "Indeterminate";
  }
  return "Indeterminate";
}

std::optional<InternalStructure> parse_structure(std::string_view name) {
  for (auto s : kAllStructures) {
    if (to_string(s) == name) return s;
  }
  return std::nullopt;
}

std::string_view to_string(PostTypeLabel l) {
  switch (l) {
    case PostTypeLabel::Status: return "Status";
    case PostTypeLabel::Reply: return "Reply";
    case PostTypeLabel::CoTweet: return "CoTweet";
    case PostTypeLabel::CroppedSnapshot: return "CroppedSnapshot";
  }
  return "Status";
}

InternalStructure classify_counts(std::size_t posts, std::size_t authors) {
  if (posts == 0 || authors == 0) return InternalStructure::Indeterminate;
  if (posts == 1) return authors == 1 ? InternalStructure::P1A1 : InternalStructure::P1An;
  return authors == 1 ? InternalStructure::PnA1 : InternalStructure::PnAn;
}

Classification classify(const ScreenshotParse& parse) {
  std::size_t posts = parse.date_count;
  bool date_free = false;
  if (posts == 0 && parse.author_count_distinct > 0) {
    posts = parse.units.size();
    date_free = true;
  }
  return {classify_counts(posts, parse.author_count_distinct), date_free};
}

std::set<PostTypeLabel> suggest_post_types(InternalStructure s) {
  switch (s) {
    case InternalStructure::P1A1: return {PostTypeLabel::Status};
    case InternalStructure::PnA1:
    case InternalStructure::PnAn: return {PostTypeLabel::Reply, PostTypeLabel::CoTweet};
    case InternalStructure::P1An: return {};
    case InternalStructure::Indeterminate: return {PostTypeLabel::CroppedSnapshot};
  }
  return {};
}

}  // namespace postshot
