#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "postshot/dates.hpp"
#include "postshot/eval.hpp"
#include "postshot/ocr.hpp"
#include "postshot/structure.hpp"

namespace postshot {

enum class FixtureLayout { WebLightLike, MobileLightLike };

std::string_view to_string(FixtureLayout l);
std::optional<FixtureLayout> parse_fixture_layout(std::string_view name);

struct PostTime {
  CalendarDate date;
  TimeOfDay time;
};

struct FixtureSpec {
  std::string screenshot_id = "fixture";
  InternalStructure structure = InternalStructure::P1A1;
  std::size_t n_posts = 1;
  std::vector<std::string> authors;  // handles without '@', one per post
  std::vector<PostTime> timestamps;
  std::vector<std::string> bodies;  // '\n' separates rendered lines
  FixtureLayout layout = FixtureLayout::WebLightLike;
  std::uint64_t seed = 0;
};

/// Line templates and content pools, loaded from a JSON data file.
struct FixtureContent {
  struct Layout {
    std::vector<std::string> post;  // "{body}" must stand alone on its line
    std::vector<std::string> between_posts;
  };
  std::map<std::string, Layout> layouts;  // keyed "WebLight", "MobileLight"
  std::vector<std::string> date_styles;
  std::vector<std::string> display_names;
  std::vector<std::string> handles;
  std::vector<std::string> sentences;
};

// The bundled data/layouts/default.json, compiled into the library.
const FixtureContent& default_fixture_content();
FixtureContent load_fixture_content(const std::filesystem::path& path);

struct Fixture {
  OcrDocument doc;
  Annotation annotation;
};

/// Renders the spec as OCR text plus the matching annotation.
/// Throws Error{InconsistentSpec}.
Fixture generate_fixture(const FixtureSpec& spec,
                         const FixtureContent& content = default_fixture_content());

// Draws a spec of the given structure from the content pools. P1An and
// Indeterminate are rejected with InconsistentSpec.
FixtureSpec random_fixture_spec(InternalStructure structure, std::uint64_t seed,
                                std::string screenshot_id,
                                const FixtureContent& content = default_fixture_content());

struct NoiseModel {
  double substitution_rate = 0.0;
  // Single code point -> replacement text.
  std::map<std::string, std::string> confusion_pairs = default_confusions();
  std::uint64_t seed = 0;

  static std::map<std::string, std::string> default_confusions();
};

/// Replaces each character that has a confusion entry with probability
/// `substitution_rate`. Line structure is untouched.
OcrDocument perturb(const OcrDocument& doc, const NoiseModel& noise);

struct CorpusRecipe {
  std::size_t count = 200;
  std::uint64_t seed = 42;
  // Shares of P1A1, PnAn, PnA1.
  double share_p1a1 = 0.70;
  double share_pnan = 0.24;
  double share_pna1 = 0.06;
  double mobile_share = 0.5;
  std::optional<NoiseModel> noise;  // per-fixture seed is noise.seed ^ index
  std::string id_prefix = "fx-";

  // key = value lines: count, seed, mix (three comma separated shares),
  // mobile_share, noise_rate, noise_seed, id_prefix.
  static CorpusRecipe load(const std::filesystem::path& path);
};

// Per-class fixture counts for the recipe, largest-remainder rounded.
std::map<InternalStructure, std::size_t> recipe_class_counts(const CorpusRecipe& recipe);

std::vector<Fixture> generate_corpus(const CorpusRecipe& recipe,
                                     const FixtureContent& content = default_fixture_content());

}  // namespace postshot
