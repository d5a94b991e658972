#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string_view>

namespace postshot {

struct ScreenshotParse;

/// Post-count by author-count taxonomy of a resource's internal structure.
enum class InternalStructure { P1A1, P1An, PnA1, PnAn, Indeterminate };

inline constexpr InternalStructure kAllStructures[] = {
    InternalStructure::P1A1, InternalStructure::P1An, InternalStructure::PnA1,
    InternalStructure::PnAn, InternalStructure::Indeterminate};

std::string_view to_string(InternalStructure s);
std::optional<InternalStructure> parse_structure(std::string_view name);

enum class PostTypeLabel { Status, Reply, CoTweet, CroppedSnapshot };

std::string_view to_string(PostTypeLabel l);

struct Classification {
  InternalStructure structure = InternalStructure::Indeterminate;
  // The post count came from the unit count because no meaningful date survived.
  bool date_free = false;
};

// The four quadrants; p = 0 or a = 0 is Indeterminate.
InternalStructure classify_counts(std::size_t posts, std::size_t authors);

Classification classify(const ScreenshotParse& parse);

inline InternalStructure classify_structure(const ScreenshotParse& parse) {
  return classify(parse).structure;
}

std::set<PostTypeLabel> suggest_post_types(InternalStructure s);

}  // namespace postshot
