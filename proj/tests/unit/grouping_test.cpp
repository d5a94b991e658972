#include <doctest.h>

#include <algorithm>
#include <random>

#include "postshot/grouping.hpp"
#include "postshot/pipeline.hpp"
#include "postshot/structure.hpp"
#include "support.hpp"

using namespace postshot;
using testing::doc_of;
using testing::words;

namespace {

const std::string kDot = " \xC2\xB7 ";

ScreenshotParse parse_of(const OcrDocument& doc) {
  static const Pipeline pipeline(words());
  return pipeline.run(doc);
}

// Unit spans are disjoint, ordered and cover [0, n).
void check_partition(const ScreenshotParse& p, std::size_t n) {
  REQUIRE_FALSE(p.units.empty());
  CHECK(p.units.front().span.first_line == 0);
  CHECK(p.units.back().span.last_line == n - 1);
  for (std::size_t i = 1; i < p.units.size(); ++i) {
    CHECK(p.units[i].span.first_line == p.units[i - 1].span.last_line + 1);
  }
}

}  // namespace

TEST_SUITE("grouping") {
  TEST_CASE("three-post thread splits at author lines") {
    auto doc = doc_of({
        "Elon Musk @elonmusk" + kDot + "Jun 3, 2024",
        "Rockets are neat",
        "Yann LeCun @ylecun" + kDot + "Jun 3, 2024",
        "I disagree with this",
        "Elon Musk @elonmusk" + kDot + "Jun 4, 2024",
        "Fair point",
    });
    auto p = parse_of(doc);
    REQUIRE(p.units.size() == 3);
    CHECK(p.units[0].span == LineSpan{0, 1});
    CHECK(p.units[1].span == LineSpan{2, 3});
    CHECK(p.units[2].span == LineSpan{4, 5});
    CHECK(p.units[1].author->handle == "ylecun");
    CHECK(p.units[1].body == "I disagree with this");
    CHECK(p.units[2].timestamp->date == CalendarDate{2024, 6, 4});
    CHECK(p.date_count == 3);
    CHECK(p.author_count_distinct == 2);
    CHECK(p.flags.empty());
    CHECK(p.structure == InternalStructure::PnAn);
  }

  TEST_CASE("leading context belongs to the first post") {
    auto doc = doc_of({"Replying to a thread", "", "Elon Musk @elonmusk" + kDot + "Jun 3, 2024", "Hello",
                       "Yann LeCun @ylecun" + kDot + "Jun 3, 2024", "Hi"});
    auto p = parse_of(doc);
    REQUIRE(p.units.size() == 2);
    CHECK(p.units[0].span == LineSpan{0, 3});
    check_partition(p, doc.size());
  }

  TEST_CASE("single post, author on line 1 and date on line 4") {
    auto doc = doc_of({"Tamsyn Vrell", "@ilsa_krunow", "What a day", "it has been",
                       "9:02 AM" + kDot + "Jun 3, 2024" + kDot + "12 Views", "12 Likes"});
    auto p = parse_of(doc);
    REQUIRE(p.units.size() == 1);
    CHECK(p.units[0].span == LineSpan{0, 5});
    REQUIRE(p.units[0].timestamp.has_value());
    CHECK(p.units[0].timestamp->line_index == 4);
    CHECK(p.flags.empty());
    CHECK(p.units[0].body_lines == std::vector<std::size_t>{0, 1, 2, 3, 4, 5});
  }

  TEST_CASE("display-name line above a bare handle joins its own post") {
    auto doc = doc_of({"Tamsyn Vrell", "@ilsa_krunow", "first body", "9:02 AM" + kDot + "Jun 3, 2024",
                       "Ostrid Penhallow", "@tvrell_88", "second body", "9:05 AM" + kDot + "Jun 3, 2024"});
    auto p = parse_of(doc);
    REQUIRE(p.units.size() == 2);
    CHECK(p.units[0].span == LineSpan{0, 3});
    CHECK(p.units[1].span == LineSpan{4, 7});
    CHECK(p.units[1].name_line == 4u);
    CHECK(p.units[0].body == "first body");
    CHECK(p.units[1].body == "second body");
  }

  TEST_CASE("two authors, one meaningful date") {
    auto doc = doc_of({"Tamsyn Vrell @ilsa_krunow", "the first post", "", "more of it",
                       "9:02 AM" + kDot + "Jun 3, 2024", "Ostrid Penhallow @tvrell_88", "a reply",
                       "with lines", "and more", "end"});
    auto p = parse_of(doc);
    REQUIRE(p.units.size() == 2);
    CHECK(p.has(ParseFlag::CountsMismatch));
    CHECK(p.units[0].timestamp.has_value());
    CHECK_FALSE(p.units[1].timestamp.has_value());
    CHECK(p.date_count == 1);
  }

  TEST_CASE("no authors") {
    auto doc = doc_of({"some text", "Jun 3, 2024"});
    auto p = parse_of(doc);
    REQUIRE(p.units.size() == 1);
    CHECK_FALSE(p.units[0].author.has_value());
    CHECK(p.units[0].span == LineSpan{0, 1});
    CHECK(p.has(ParseFlag::NoAuthors));
    CHECK(p.has(ParseFlag::CountsMismatch));
    CHECK(p.structure == InternalStructure::Indeterminate);
  }

  TEST_CASE("empty document") {
    auto p = parse_of(doc_of({}));
    CHECK(p.units.empty());
    CHECK(p.has(ParseFlag::EmptyDocument));
    CHECK(p.has(ParseFlag::NoAuthors));
    CHECK(p.has(ParseFlag::NoDates));
    CHECK(p.structure == InternalStructure::Indeterminate);
  }

  TEST_CASE("authors without dates fall back to the unit count") {
    auto doc = doc_of({"Tamsyn Vrell @ilsa_krunow", "one", "Tamsyn Vrell @ilsa_krunow", "two"});
    auto p = parse_of(doc);
    CHECK(p.has(ParseFlag::NoDates));
    CHECK(p.date_free);
    CHECK(p.structure == InternalStructure::PnA1);
  }

  TEST_CASE("author counting is case-insensitive") {
    auto doc = doc_of({"Tamsyn Vrell @Ilsa_Krunow" + kDot + "Jun 3, 2024", "one",
                       "Tamsyn Vrell @ilsa_krunow" + kDot + "Jun 3, 2024", "two"});
    CHECK(parse_of(doc).author_count_distinct == 1);
  }

  TEST_CASE("only the first author on a line opens a unit") {
    auto doc = doc_of({"@ilsa_krunow @tvrell_88" + kDot + "Jun 3, 2024", "text"});
    auto p = parse_of(doc);
    CHECK(p.units.size() == 1);
    CHECK(p.units[0].author->handle == "ilsa_krunow");
  }

  TEST_CASE("property: order of non-author mentions does not matter") {
    auto doc = doc_of({"@ilsa_krunow" + kDot + "Jun 3, 2024", "thanks @user9999 for the support",
                       "back in June 3, 2020 we said this would happen", "@tvrell_88" + kDot + "Jun 4, 2024",
                       "yes"});
    auto handles = filter_author_handles(find_handle_mentions(doc), doc, words());
    auto dates = filter_meaningful_dates(find_timestamp_mentions(doc), doc, words());
    auto base = group_posts(doc, handles, dates);
    std::mt19937 rng(3);
    for (int i = 0; i < 20; ++i) {
      std::shuffle(handles.begin(), handles.end(), rng);
      std::shuffle(dates.begin(), dates.end(), rng);
      CHECK(group_posts(doc, handles, dates) == base);
    }
  }

  TEST_CASE("property: appending lines only changes the last unit") {
    std::vector<std::string> lines = {"@ilsa_krunow" + kDot + "Jun 3, 2024", "one", "@tvrell_88" + kDot + "Jun 4, 2024",
                                      "two"};
    auto before = parse_of(doc_of(lines));
    for (const char* extra : {"more", "", "Jun 9, 2024", "thanks @user9999 for the support"}) {
      lines.push_back(extra);
      auto after = parse_of(doc_of(lines));
      REQUIRE(after.units.size() == before.units.size());
      for (std::size_t i = 0; i + 1 < before.units.size(); ++i) CHECK(after.units[i] == before.units[i]);
      check_partition(after, lines.size());
    }
  }
}

TEST_SUITE("structure") {
  TEST_CASE("quadrants") {
    CHECK(classify_counts(1, 1) == InternalStructure::P1A1);
    CHECK(classify_counts(1, 2) == InternalStructure::P1An);
    CHECK(classify_counts(2, 1) == InternalStructure::PnA1);
    CHECK(classify_counts(3, 2) == InternalStructure::PnAn);
    CHECK(classify_counts(0, 0) == InternalStructure::Indeterminate);
    CHECK(classify_counts(0, 3) == InternalStructure::Indeterminate);
    CHECK(classify_counts(3, 0) == InternalStructure::Indeterminate);
  }

  TEST_CASE("property: classification is total and depends only on counts") {
    for (std::size_t p = 0; p < 12; ++p) {
      for (std::size_t a = 0; a < 12; ++a) {
        auto s = classify_counts(p, a);
        int hits = (p == 1 && a == 1) + (p == 1 && a > 1) + (p > 1 && a == 1) + (p > 1 && a > 1) +
                   (p == 0 || a == 0);
        CHECK(hits == 1);
        if (p == 0 || a == 0) CHECK(s == InternalStructure::Indeterminate);
        ScreenshotParse parse;
        parse.date_count = p;
        parse.author_count_distinct = a;
        parse.units.resize(std::max<std::size_t>(1, p));
        CHECK(classify(parse).structure == (p == 0 && a > 0 ? classify_counts(parse.units.size(), a) : s));
      }
    }
  }

  TEST_CASE("post types") {
    using L = PostTypeLabel;
    CHECK(suggest_post_types(InternalStructure::P1A1) == std::set<L>{L::Status});
    CHECK(suggest_post_types(InternalStructure::PnAn) == std::set<L>{L::Reply, L::CoTweet});
    CHECK(suggest_post_types(InternalStructure::PnA1) == std::set<L>{L::Reply, L::CoTweet});
    CHECK(suggest_post_types(InternalStructure::P1An).empty());
    CHECK(suggest_post_types(InternalStructure::Indeterminate) == std::set<L>{L::CroppedSnapshot});
    auto a = suggest_post_types(InternalStructure::P1A1);
    for (auto l : suggest_post_types(InternalStructure::PnAn)) CHECK(a.count(l) == 0);
  }

  TEST_CASE("names round-trip") {
    for (auto s : kAllStructures) CHECK(parse_structure(to_string(s)) == s);
    CHECK_FALSE(parse_structure("P2A2").has_value());
  }
}
