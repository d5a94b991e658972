#include "postshot/corpus.hpp"

#include <cstdio>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "postshot/error.hpp"
#include "postshot/metadata.hpp"
#include "postshot/text.hpp"

namespace postshot {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(Platform p) {
  switch (p) {
    case Platform::Facebook: return "Facebook";
    case Platform::Instagram: return "Instagram";
    case Platform::TruthSocial: return "TruthSocial";
    case Platform::Twitter: return "Twitter";
  }
  return "Twitter";
}

std::optional<Platform> parse_platform(std::string_view name) {
  std::string l = text::to_lower_ascii(name);
  if (l == "facebook" || l == "fb") return Platform::Facebook;
  if (l == "instagram" || l == "ig") return Platform::Instagram;
  if (l == "truthsocial" || l == "truth_social" || l == "ts") return Platform::TruthSocial;
  if (l == "twitter" || l == "x" || l == "t") return Platform::Twitter;
  return std::nullopt;
}

std::string_view platform_short_name(Platform p) {
  switch (p) {
    case Platform::Facebook: return "FB";
    case Platform::Instagram: return "IG";
    case Platform::TruthSocial: return "TS";
    case Platform::Twitter: return "T";
  }
  return "T";
}

namespace {

std::vector<std::string_view> path_segments(std::string_view path) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < path.size()) {
    std::size_t j = path.find('/', i);
    if (j == std::string_view::npos) j = path.size();
    if (j > i) out.push_back(path.substr(i, j - i));
    i = j + 1;
  }
  return out;
}

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

bool handle_like(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), is_handle_char);
}

bool valid_host(std::string_view host) {
  if (host.empty() || host.front() == '.' || host.back() == '.') return false;
  return std::all_of(host.begin(), host.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '.' || c == '-';
  });
}

}  // namespace

std::optional<PostUrl> parse_post_url(std::string_view url) {
  url = text::trim(url);
  std::string_view rest;
  if (url.rfind("https://", 0) == 0) rest = url.substr(8);
  else if (url.rfind("http://", 0) == 0) rest = url.substr(7);
  else return std::nullopt;
  if (rest.find_first_of(" \t") != std::string_view::npos) return std::nullopt;

  std::size_t slash = rest.find_first_of("/?#");
  std::string host = text::to_lower_ascii(rest.substr(0, slash));
  if (auto colon = host.find(':'); colon != std::string::npos) host.erase(colon);
  if (!valid_host(host)) return std::nullopt;
  std::string_view path = slash == std::string_view::npos ? std::string_view{} : rest.substr(slash);
  if (auto q = path.find_first_of("?#"); q != std::string_view::npos) path = path.substr(0, q);

  for (std::string_view prefix : {"www.", "mobile.", "m."}) {
    if (host.rfind(prefix, 0) == 0) {
      host.erase(0, prefix.size());
      break;
    }
  }
  PostUrl out;
  out.url = std::string(url);
  auto seg = path_segments(path);
  if (host == "twitter.com" || host == "x.com") {
    out.platform = Platform::Twitter;
    if (seg.size() >= 3 && seg[1] == "status" && handle_like(seg[0]) && all_digits(seg[2])) {
      out.account = std::string(seg[0]);
      out.post_id = std::string(seg[2]);
    }
  } else if (host == "instagram.com") {
    out.platform = Platform::Instagram;
    if (seg.size() >= 2 && (seg[0] == "p" || seg[0] == "reel")) out.post_id = std::string(seg[1]);
  } else if (host == "facebook.com") {
    out.platform = Platform::Facebook;
    if (seg.size() >= 3 && seg[1] == "posts") {
      out.account = std::string(seg[0]);
      out.post_id = std::string(seg[2]);
    }
  } else if (host == "truthsocial.com") {
    out.platform = Platform::TruthSocial;
    if (seg.size() >= 2 && seg[0].size() > 1 && seg[0].front() == '@') {
      out.account = std::string(seg[0].substr(1));
      std::string_view id = (seg.size() >= 3 && seg[1] == "posts") ? seg[2] : seg[1];
      if (all_digits(id)) out.post_id = std::string(id);
    }
  } else {
    return std::nullopt;
  }
  return out;
}

std::vector<PostUrl> load_url_list(const fs::path& path, Platform platform) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::FileNotFound, "cannot open URL list: " + path.string());
  std::vector<PostUrl> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto t = text::trim(line);
    if (t.empty() || t.front() == '#') continue;
    auto u = parse_post_url(t);
    if (!u) throw Error(ErrorCode::MalformedUrl, "not a post URL: " + std::string(t), lineno);
    if (u->platform != platform) {
      throw Error(ErrorCode::MalformedUrl,
                  "URL host is " + std::string(to_string(u->platform)) + ", expected " +
                      std::string(to_string(platform)),
                  lineno);
    }
    out.push_back(std::move(*u));
  }
  return out;
}

PostUrl build_url(Platform platform, std::string_view post_id, std::optional<std::string_view> account) {
  if (post_id.empty()) throw Error(ErrorCode::SchemaViolation, "empty post id", std::nullopt, "post_id");
  auto need_account = [&]() -> std::string {
    if (!account || account->empty()) {
      throw Error(ErrorCode::MissingAccount,
                  std::string(to_string(platform)) + " permalinks need an account name");
    }
    return std::string(*account);
  };
  std::string id(post_id);
  std::string url;
  std::optional<std::string> acct;
  switch (platform) {
    case Platform::Instagram:
      url = "https://www.instagram.com/p/" + id + "/";
      break;
    case Platform::Twitter:
      acct = need_account();
      url = "https://twitter.com/" + *acct + "/status/" + id;
      break;
    case Platform::Facebook:
      acct = need_account();
      url = "https://www.facebook.com/" + *acct + "/posts/" + id;
      break;
    case Platform::TruthSocial:
      acct = need_account();
      url = "https://truthsocial.com/@" + *acct + "/posts/" + id;
      break;
  }
  return PostUrl{platform, url, id, acct};
}

void for_each_jsonl(const fs::path& path, const std::function<void(const json&, std::size_t)>& fn) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::FileNotFound, "cannot open " + path.string());
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::SchemaViolation, std::string("invalid JSON: ") + e.what(), lineno);
    }
    fn(j, lineno);
  }
}

namespace {

template <typename Records, typename ToJson>
void write_jsonl(const Records& records, const fs::path& path, ToJson to_json) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  for (const auto& r : records) out << to_json(r).dump() << '\n';
  if (!out) throw Error(ErrorCode::IoError, "write failed: " + path.string());
}

// Typed field access that reports the record line and field name on failure.
class Fields {
 public:
  Fields(const json& j, std::size_t line) : j_(j), line_(line) {
    if (!j.is_object()) fail("<record>", "not an object");
  }

  [[noreturn]] void fail(const std::string& field, const std::string& why) const {
    throw Error(ErrorCode::SchemaViolation, field + ": " + why,
                line_ ? std::optional<std::size_t>(line_) : std::nullopt, field);
  }

  const json& get(const std::string& field) const {
    auto it = j_.find(field);
    if (it == j_.end()) fail(field, "missing");
    return *it;
  }

  bool has(const std::string& field) const {
    auto it = j_.find(field);
    return it != j_.end() && !it->is_null();
  }

  std::string str(const std::string& field) const {
    const auto& v = get(field);
    if (!v.is_string()) fail(field, "not a string");
    return v.get<std::string>();
  }

  std::size_t count(const std::string& field) const {
    const auto& v = get(field);
    if (!v.is_number_unsigned()) fail(field, "not a nonnegative integer");
    return v.get<std::size_t>();
  }

  void check_version() const {
    const auto& v = get("schema_version");
    if (!v.is_number_integer() || v.get<int>() != kSchemaVersion) {
      fail("schema_version", "unsupported version");
    }
  }

  std::size_t line() const { return line_; }

 private:
  const json& j_;
  std::size_t line_;
};

}  // namespace

ordered_json annotation_to_json(const Annotation& a) {
  ordered_json units = ordered_json::array();
  for (const auto& u : a.true_units) {
    ordered_json ju;
    ju["author"] = u.author;
    if (u.date) ju["date"] = u.date->iso();
    ju["body"] = u.body;
    units.push_back(std::move(ju));
  }
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["screenshot_id"] = a.screenshot_id;
  j["true_structure"] = std::string(to_string(a.true_structure));
  j["units"] = std::move(units);
  return j;
}

Annotation annotation_from_json(const json& j, std::size_t line) {
  Fields f(j, line);
  f.check_version();
  Annotation a;
  a.screenshot_id = f.str("screenshot_id");
  if (a.screenshot_id.empty()) f.fail("screenshot_id", "empty");
  auto s = parse_structure(f.str("true_structure"));
  if (!s || *s == InternalStructure::Indeterminate) f.fail("true_structure", "not an annotatable category");
  a.true_structure = *s;
  const auto& units = f.get("units");
  if (!units.is_array() || units.empty()) f.fail("units", "must be a nonempty array");
  for (const auto& ju : units) {
    Fields uf(ju, line);
    AnnotatedUnit u;
    u.author = uf.str("author");
    if (u.author.empty()) uf.fail("units.author", "empty");
    u.body = uf.str("body");
    if (uf.has("date")) {
      u.date = CalendarDate::from_iso(uf.str("date"));
      if (!u.date) uf.fail("units.date", "not a YYYY-MM-DD date");
    }
    a.true_units.push_back(std::move(u));
  }
  return a;
}

std::vector<Annotation> load_annotations(const fs::path& path) {
  std::vector<Annotation> out;
  for_each_jsonl(path, [&](const json& j, std::size_t line) { out.push_back(annotation_from_json(j, line)); });
  return out;
}

void save_annotations(const std::vector<Annotation>& anns, const fs::path& path) {
  write_jsonl(anns, path, annotation_to_json);
}

bool annotation_consistent(const Annotation& a) {
  std::set<std::string> authors;
  for (const auto& u : a.true_units) {
    std::string_view h = text::trim(u.author);
    if (!h.empty() && h.front() == '@') h.remove_prefix(1);
    authors.insert(text::to_lower_ascii(h));
  }
  return classify_counts(a.true_units.size(), authors.size()) == a.true_structure;
}

std::string_view to_string(CaptureMode m) {
  switch (m) {
    case CaptureMode::WebLight: return "WebLight";
    case CaptureMode::WebDark: return "WebDark";
    case CaptureMode::MobileLight: return "MobileLight";
    case CaptureMode::MobileDark: return "MobileDark";
  }
  return "WebLight";
}

std::optional<CaptureMode> parse_capture_mode(std::string_view name) {
  for (auto m : kAllModes) {
    if (to_string(m) == name || mode_short_name(m) == name) return m;
  }
  return std::nullopt;
}

std::string_view mode_short_name(CaptureMode m) {
  switch (m) {
    case CaptureMode::WebLight: return "WL";
    case CaptureMode::WebDark: return "WD";
    case CaptureMode::MobileLight: return "ML";
    case CaptureMode::MobileDark: return "MD";
  }
  return "WL";
}

std::string_view to_string(CaptureStatus s) {
  switch (s) {
    case CaptureStatus::Ok: return "Ok";
    case CaptureStatus::BrokenUrl: return "BrokenUrl";
    case CaptureStatus::Skipped: return "Skipped";
  }
  return "Ok";
}

std::optional<CaptureStatus> parse_capture_status(std::string_view name) {
  for (auto s : {CaptureStatus::Ok, CaptureStatus::BrokenUrl, CaptureStatus::Skipped}) {
    if (to_string(s) == name) return s;
  }
  return std::nullopt;
}

ordered_json manifest_entry_to_json(const CaptureManifestEntry& e) {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["screenshot_id"] = e.screenshot_id;
  j["platform"] = std::string(to_string(e.post_url.platform));
  j["mode"] = std::string(to_string(e.mode));
  j["url"] = e.post_url.url;
  if (e.image_path) j["image_path"] = *e.image_path;
  j["captured_at"] = e.captured_at;
  j["status"] = std::string(to_string(e.status));
  return j;
}

CaptureManifestEntry manifest_entry_from_json(const json& j, std::size_t line) {
  static const std::regex kTimestamp(
      R"(\d{4}-\d{2}-\d{2}T\d{2}:\d{2}:\d{2}(\.\d+)?(Z|[+-]\d{2}:\d{2}))");
  Fields f(j, line);
  f.check_version();
  CaptureManifestEntry e;
  e.screenshot_id = f.str("screenshot_id");
  if (e.screenshot_id.empty()) f.fail("screenshot_id", "empty");
  auto platform = parse_platform(f.str("platform"));
  if (!platform) f.fail("platform", "unknown platform");
  auto mode = parse_capture_mode(f.str("mode"));
  if (!mode) f.fail("mode", "unknown capture mode");
  e.mode = *mode;
  auto url = parse_post_url(f.str("url"));
  if (!url) f.fail("url", "not a post URL");
  if (url->platform != *platform) f.fail("url", "host does not match platform");
  e.post_url = std::move(*url);
  e.captured_at = f.str("captured_at");
  if (!std::regex_match(e.captured_at, kTimestamp)) f.fail("captured_at", "not an ISO-8601 timestamp");
  auto status = parse_capture_status(f.str("status"));
  if (!status) f.fail("status", "unknown status");
  e.status = *status;
  if (f.has("image_path")) e.image_path = f.str("image_path");
  if ((e.status == CaptureStatus::Ok) != e.image_path.has_value()) {
    f.fail("image_path", "required exactly when status is Ok");
  }
  return e;
}

std::vector<CaptureManifestEntry> load_manifest(const fs::path& path) {
  std::vector<CaptureManifestEntry> out;
  for_each_jsonl(path, [&](const json& j, std::size_t line) { out.push_back(manifest_entry_from_json(j, line)); });
  return out;
}

void save_manifest(const std::vector<CaptureManifestEntry>& entries, const fs::path& path) {
  write_jsonl(entries, path, manifest_entry_to_json);
}

namespace {
std::size_t row_of(CaptureMode m) {
  for (std::size_t i = 0; i < ManifestTally::kRowOrder.size(); ++i) {
    if (ManifestTally::kRowOrder[i] == m) return i;
  }
  return 0;
}
}  // namespace

std::size_t& ManifestTally::at(CaptureMode m, Platform p) {
  return counts[row_of(m)][static_cast<std::size_t>(p)];
}

std::size_t ManifestTally::at(CaptureMode m, Platform p) const {
  return counts[row_of(m)][static_cast<std::size_t>(p)];
}

std::size_t ManifestTally::platform_total(Platform p) const {
  std::size_t s = 0;
  for (const auto& row : counts) s += row[static_cast<std::size_t>(p)];
  return s;
}

std::size_t ManifestTally::total() const {
  std::size_t s = 0;
  for (auto p : kAllPlatforms) s += platform_total(p);
  return s;
}

std::string ManifestTally::format_table() const {
  std::ostringstream out;
  char buf[96];
  std::snprintf(buf, sizeof buf, "%-15s", "Mode/Platform");
  out << buf;
  for (auto p : kAllPlatforms) {
    std::snprintf(buf, sizeof buf, "%8s", std::string(platform_short_name(p)).c_str());
    out << buf;
  }
  out << '\n';
  for (auto m : kRowOrder) {
    std::snprintf(buf, sizeof buf, "%-15s", std::string(mode_short_name(m)).c_str());
    out << buf;
    for (auto p : kAllPlatforms) {
      std::snprintf(buf, sizeof buf, "%8zu", at(m, p));
      out << buf;
    }
    out << '\n';
  }
  std::snprintf(buf, sizeof buf, "%-15s", "Platform Total");
  out << buf;
  for (auto p : kAllPlatforms) {
    std::snprintf(buf, sizeof buf, "%8zu", platform_total(p));
    out << buf;
  }
  out << '\n';
  return out.str();
}

std::string ManifestTally::to_csv() const {
  std::ostringstream out;
  out << "mode";
  for (auto p : kAllPlatforms) out << ',' << platform_short_name(p);
  out << '\n';
  for (auto m : kRowOrder) {
    out << mode_short_name(m);
    for (auto p : kAllPlatforms) out << ',' << at(m, p);
    out << '\n';
  }
  out << "Platform Total";
  for (auto p : kAllPlatforms) out << ',' << platform_total(p);
  out << '\n';
  return out.str();
}

ManifestTally tally_manifest(const std::vector<CaptureManifestEntry>& entries) {
  ManifestTally t;
  for (const auto& e : entries) {
    if (e.status == CaptureStatus::Ok) ++t.at(e.mode, e.post_url.platform);
  }
  return t;
}

namespace {

ordered_json timestamp_to_json(const TimestampMention& t) {
  ordered_json j;
  j["raw"] = t.raw_text;
  if (t.date) j["date"] = t.date->iso();
  if (t.time) j["time"] = t.time->hhmm();
  j["line"] = t.line_index;
  j["offset"] = t.char_offset;
  return j;
}

TimestampMention timestamp_from_json(const json& j, std::size_t line) {
  Fields f(j, line);
  TimestampMention t;
  t.raw_text = f.str("raw");
  if (f.has("date")) {
    t.date = CalendarDate::from_iso(f.str("date"));
    if (!t.date) f.fail("date", "not a YYYY-MM-DD date");
  }
  if (f.has("time")) {
    std::string hm = f.str("time");
    unsigned h = 0, m = 0;
    if (hm.size() != 5 || std::sscanf(hm.c_str(), "%2u:%2u", &h, &m) != 2 || h > 23 || m > 59) {
      f.fail("time", "not HH:MM");
    }
    t.time = TimeOfDay{h, m};
  }
  t.line_index = f.count("line");
  t.char_offset = f.count("offset");
  t.meaningful = true;
  return t;
}

}  // namespace

ordered_json parse_to_json(const ScreenshotParse& p) {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["screenshot_id"] = p.screenshot_id;
  j["structure"] = std::string(to_string(p.structure));
  j["date_free"] = p.date_free;
  ordered_json types = ordered_json::array();
  for (auto t : suggest_post_types(p.structure)) types.push_back(std::string(to_string(t)));
  j["post_types"] = types;
  j["date_count"] = p.date_count;
  j["author_count_distinct"] = p.author_count_distinct;
  ordered_json flags = ordered_json::array();
  for (auto f : p.flags) flags.push_back(std::string(to_string(f)));
  j["flags"] = flags;
  ordered_json units = ordered_json::array();
  for (const auto& u : p.units) {
    ordered_json ju;
    ju["span"] = {u.span.first_line, u.span.last_line};
    if (u.author) {
      ju["author"] = {{"handle", u.author->handle},
                      {"line", u.author->line_index},
                      {"offset", u.author->char_offset}};
    } else {
      ju["author"] = nullptr;
    }
    ju["name_line"] = u.name_line ? ordered_json(*u.name_line) : ordered_json(nullptr);
    ju["timestamp"] = u.timestamp ? timestamp_to_json(*u.timestamp) : ordered_json(nullptr);
    ordered_json dates = ordered_json::array();
    for (const auto& d : u.dates) dates.push_back(timestamp_to_json(d));
    ju["dates"] = dates;
    ju["body"] = u.body;
    units.push_back(std::move(ju));
  }
  j["units"] = units;
  return j;
}

ScreenshotParse parse_from_json(const json& j, std::size_t line) {
  Fields f(j, line);
  f.check_version();
  ScreenshotParse p;
  p.screenshot_id = f.str("screenshot_id");
  auto s = parse_structure(f.str("structure"));
  if (!s) f.fail("structure", "unknown category");
  p.structure = *s;
  if (f.has("date_free")) {
    if (!f.get("date_free").is_boolean()) f.fail("date_free", "not a boolean");
    p.date_free = f.get("date_free").get<bool>();
  }
  p.date_count = f.count("date_count");
  p.author_count_distinct = f.count("author_count_distinct");
  const auto& flags = f.get("flags");
  if (!flags.is_array()) f.fail("flags", "not an array");
  for (const auto& fl : flags) {
    auto flag = fl.is_string() ? parse_flag(fl.get<std::string>()) : std::nullopt;
    if (!flag) f.fail("flags", "unknown flag");
    p.flags.insert(*flag);
  }
  const auto& units = f.get("units");
  if (!units.is_array()) f.fail("units", "not an array");
  for (const auto& ju : units) {
    Fields uf(ju, line);
    PostUnit u;
    const auto& span = uf.get("span");
    if (!span.is_array() || span.size() != 2 || !span[0].is_number_unsigned() ||
        !span[1].is_number_unsigned() || span[0].get<std::size_t>() > span[1].get<std::size_t>()) {
      uf.fail("units.span", "not [first, last]");
    }
    u.span = {span[0].get<std::size_t>(), span[1].get<std::size_t>()};
    for (std::size_t i = u.span.first_line; i <= u.span.last_line; ++i) u.body_lines.push_back(i);
    if (uf.has("author")) {
      Fields af(ju["author"], line);
      u.author = HandleMention{af.str("handle"), af.count("line"), af.count("offset"), true};
    }
    if (uf.has("name_line")) u.name_line = uf.count("name_line");
    if (uf.has("timestamp")) u.timestamp = timestamp_from_json(ju["timestamp"], line);
    if (ju.contains("dates")) {
      for (const auto& d : ju["dates"]) u.dates.push_back(timestamp_from_json(d, line));
    }
    u.body = uf.str("body");
    p.units.push_back(std::move(u));
  }
  return p;
}

std::vector<ScreenshotParse> load_parses(const fs::path& path) {
  std::vector<ScreenshotParse> out;
  for_each_jsonl(path, [&](const json& j, std::size_t line) { out.push_back(parse_from_json(j, line)); });
  return out;
}

}  // namespace postshot
