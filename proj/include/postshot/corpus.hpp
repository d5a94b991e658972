#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "postshot/eval.hpp"
#include "postshot/grouping.hpp"

namespace postshot {

inline constexpr int kSchemaVersion = 1;

enum class Platform { Facebook, Instagram, TruthSocial, Twitter };
inline constexpr Platform kAllPlatforms[] = {Platform::Facebook, Platform::Instagram,
                                             Platform::TruthSocial, Platform::Twitter};

std::string_view to_string(Platform p);
std::optional<Platform> parse_platform(std::string_view name);  // also accepts "x"
std::string_view platform_short_name(Platform p);                // FB, IG, TS, T

struct PostUrl {
  Platform platform = Platform::Twitter;
  std::string url;
  std::optional<std::string> post_id;
  std::optional<std::string> account;

  bool operator==(const PostUrl&) const = default;
};

/// Parses an absolute http(s) URL, detecting the platform from the host
/// (x.com and twitter.com are the same platform) and pulling the account and
/// post id out of recognizable permalink paths. Returns nullopt for anything
/// that is not a URL of one of the four platforms.
std::optional<PostUrl> parse_post_url(std::string_view url);

/// Skips blank lines and '#' comments. Throws Error{FileNotFound |
/// MalformedUrl(line)}; a URL for a different platform is also malformed.
std::vector<PostUrl> load_url_list(const std::filesystem::path& path, Platform platform);

/// Canonical permalink for a post id. Throws Error{MissingAccount}.
PostUrl build_url(Platform platform, std::string_view post_id,
                  std::optional<std::string_view> account = std::nullopt);

// Annotations: one JSON object per line.
nlohmann::ordered_json annotation_to_json(const Annotation& a);
Annotation annotation_from_json(const nlohmann::json& j, std::size_t line = 0);
std::vector<Annotation> load_annotations(const std::filesystem::path& path);
void save_annotations(const std::vector<Annotation>& anns, const std::filesystem::path& path);

// Post count and distinct author count agree with the declared structure.
bool annotation_consistent(const Annotation& a);

enum class CaptureMode { WebLight, WebDark, MobileLight, MobileDark };
inline constexpr CaptureMode kAllModes[] = {CaptureMode::WebLight, CaptureMode::WebDark,
                                            CaptureMode::MobileLight, CaptureMode::MobileDark};

std::string_view to_string(CaptureMode m);
std::optional<CaptureMode> parse_capture_mode(std::string_view name);
std::string_view mode_short_name(CaptureMode m);  // WL, WD, ML, MD

enum class CaptureStatus { Ok, BrokenUrl, Skipped };

std::string_view to_string(CaptureStatus s);
std::optional<CaptureStatus> parse_capture_status(std::string_view name);

struct CaptureManifestEntry {
  std::string screenshot_id;
  PostUrl post_url;
  CaptureMode mode = CaptureMode::WebLight;
  std::optional<std::string> image_path;  // present iff status == Ok
  std::string captured_at;                // ISO-8601 UTC, e.g. 2024-06-03T09:02:00Z
  CaptureStatus status = CaptureStatus::Ok;

  bool operator==(const CaptureManifestEntry&) const = default;
};

nlohmann::ordered_json manifest_entry_to_json(const CaptureManifestEntry& e);
CaptureManifestEntry manifest_entry_from_json(const nlohmann::json& j, std::size_t line = 0);
std::vector<CaptureManifestEntry> load_manifest(const std::filesystem::path& path);
void save_manifest(const std::vector<CaptureManifestEntry>& entries,
                   const std::filesystem::path& path);

/// Ok entries counted by mode (rows MD, ML, WD, WL) and platform
/// (columns FB, IG, TS, T).
struct ManifestTally {
  static constexpr std::array<CaptureMode, 4> kRowOrder = {
      CaptureMode::MobileDark, CaptureMode::MobileLight, CaptureMode::WebDark, CaptureMode::WebLight};

  std::array<std::array<std::size_t, 4>, 4> counts{};  // [row][platform]

  std::size_t& at(CaptureMode m, Platform p);
  std::size_t at(CaptureMode m, Platform p) const;
  std::size_t platform_total(Platform p) const;
  std::size_t total() const;
  std::string format_table() const;
  std::string to_csv() const;
};

ManifestTally tally_manifest(const std::vector<CaptureManifestEntry>& entries);

// Parse records, the per-screenshot output of extraction.
nlohmann::ordered_json parse_to_json(const ScreenshotParse& p);
ScreenshotParse parse_from_json(const nlohmann::json& j, std::size_t line = 0);
std::vector<ScreenshotParse> load_parses(const std::filesystem::path& path);

// Reads a JSONL file, calling `fn(json, line_number)` for every nonblank line.
// Throws Error{FileNotFound | SchemaViolation} for unreadable or malformed lines.
void for_each_jsonl(const std::filesystem::path& path,
                    const std::function<void(const nlohmann::json&, std::size_t)>& fn);

}  // namespace postshot
