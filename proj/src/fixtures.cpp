#include "postshot/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>

#include <json.hpp>

#include "fixture_content.hpp"
#include "postshot/error.hpp"
#include "postshot/metadata.hpp"
#include "postshot/text.hpp"

namespace postshot {

namespace fs = std::filesystem;

std::string_view to_string(FixtureLayout l) {
  return l == FixtureLayout::WebLightLike ? "WebLight" : "MobileLight";
}

std::optional<FixtureLayout> parse_fixture_layout(std::string_view name) {
  if (name == "WebLight" || name == "WebLightLike") return FixtureLayout::WebLightLike;
  if (name == "MobileLight" || name == "MobileLightLike") return FixtureLayout::MobileLightLike;
  return std::nullopt;
}

namespace {

FixtureContent content_from_json(const nlohmann::json& j) {
  auto fail = [](const std::string& why) {
    throw Error(ErrorCode::InvalidConfig, "fixture content: " + why);
  };
  try {
    FixtureContent c;
    for (const auto& [name, lj] : j.at("layouts").items()) {
      if (!parse_fixture_layout(name)) fail("unknown layout " + name);
      FixtureContent::Layout l;
      l.post = lj.at("post").get<std::vector<std::string>>();
      l.between_posts = lj.value("between_posts", std::vector<std::string>{});
      if (std::count(l.post.begin(), l.post.end(), "{body}") != 1) {
        fail("layout " + name + " needs exactly one \"{body}\" line");
      }
      c.layouts[name] = std::move(l);
    }
    c.date_styles = j.at("date_styles").get<std::vector<std::string>>();
    c.display_names = j.at("display_names").get<std::vector<std::string>>();
    c.handles = j.at("handles").get<std::vector<std::string>>();
    c.sentences = j.at("sentences").get<std::vector<std::string>>();
    if (c.date_styles.empty() || c.display_names.empty() || c.handles.size() < 2 ||
        c.sentences.empty()) {
      fail("pools must be nonempty (and at least two handles)");
    }
    return c;
  } catch (const nlohmann::json::exception& e) {
    fail(e.what());
  }
  return {};
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

template <typename T>
const T& pick(const std::vector<T>& v, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> d(0, v.size() - 1);
  return v[d(rng)];
}

std::size_t uniform(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

std::string render_date(const CalendarDate& d, const std::string& style) {
  char buf[32];
  if (style == "month_day_year") {
    std::snprintf(buf, sizeof buf, "%s %u, %d", std::string(month_abbrev(d.month)).c_str(), d.day, d.year);
  } else if (style == "day_month_year") {
    std::snprintf(buf, sizeof buf, "%u %s %d", d.day, std::string(month_abbrev(d.month)).c_str(), d.year);
  } else if (style == "numeric_mdy") {
    std::snprintf(buf, sizeof buf, "%02u/%02u/%04d", d.month, d.day, d.year);
  } else if (style == "numeric_mdy_short") {
    std::snprintf(buf, sizeof buf, "%u/%u/%02d", d.month, d.day, d.year % 100);
  } else if (style == "iso") {
    return d.iso();
  } else {
    throw Error(ErrorCode::InvalidConfig, "unknown date style " + style);
  }
  return buf;
}

std::string render_time(const TimeOfDay& t) {
  unsigned h12 = t.hour % 12 == 0 ? 12 : t.hour % 12;
  char buf[16];
  std::snprintf(buf, sizeof buf, "%u:%02u %s", h12, t.minute, t.hour < 12 ? "AM" : "PM");
  return buf;
}

std::string render_views(std::mt19937_64& rng) {
  switch (uniform(rng, 0, 2)) {
    case 0: return std::to_string(uniform(rng, 1, 999));
    case 1: return std::to_string(uniform(rng, 1, 999)) + "." + std::to_string(uniform(rng, 0, 9)) + "K";
    default: return std::to_string(uniform(rng, 1, 9)) + "." + std::to_string(uniform(rng, 0, 9)) + "M";
  }
}

void replace_all(std::string& s, std::string_view from, std::string_view to) {
  for (std::size_t pos = 0; (pos = s.find(from, pos)) != std::string::npos; pos += to.size()) {
    s.replace(pos, from.size(), to);
  }
}

void validate(const FixtureSpec& spec) {
  auto fail = [&](const std::string& why) { throw Error(ErrorCode::InconsistentSpec, why); };
  if (spec.structure == InternalStructure::Indeterminate) fail("structure must be a concrete category");
  if (spec.n_posts < 1) fail("n_posts must be at least 1");
  if (spec.authors.size() != spec.n_posts || spec.timestamps.size() != spec.n_posts ||
      spec.bodies.size() != spec.n_posts) {
    fail("authors, timestamps and bodies must each have n_posts entries");
  }
  std::set<std::string> distinct;
  for (const auto& a : spec.authors) {
    if (a.size() < kMinHandleLength || a.size() > kMaxHandleLength ||
        !std::all_of(a.begin(), a.end(), is_handle_char)) {
      fail("invalid handle " + a);
    }
    distinct.insert(text::to_lower_ascii(a));
  }
  if (classify_counts(spec.n_posts, distinct.size()) != spec.structure) {
    fail("author and post counts do not give " + std::string(to_string(spec.structure)));
  }
  for (const auto& t : spec.timestamps) {
    if (!t.date.valid() || t.time.hour > 23 || t.time.minute > 59) fail("invalid timestamp");
  }
  for (const auto& b : spec.bodies) {
    if (text::collapse_whitespace(b).empty()) fail("empty body");
  }
}

std::vector<std::string> body_lines(const std::string& body) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= body.size()) {
    std::size_t end = body.find('\n', start);
    if (end == std::string::npos) end = body.size();
    out.push_back(body.substr(start, end - start));
    start = end + 1;
  }
  return out;
}

std::size_t utf8_length(unsigned char lead) {
  if (lead < 0x80) return 1;
  if ((lead >> 5) == 0x6) return 2;
  if ((lead >> 4) == 0xE) return 3;
  if ((lead >> 3) == 0x1E) return 4;
  return 1;
}

}  // namespace

const FixtureContent& default_fixture_content() {
  static const FixtureContent content =
      content_from_json(nlohmann::json::parse(detail::kDefaultFixtureContent));
  return content;
}

FixtureContent load_fixture_content(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::FileNotFound, "cannot open fixture content " + path.string());
  try {
    return content_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("fixture content: ") + e.what());
  }
}

Fixture generate_fixture(const FixtureSpec& spec, const FixtureContent& content) {
  validate(spec);
  auto layout_it = content.layouts.find(std::string(to_string(spec.layout)));
  if (layout_it == content.layouts.end()) {
    throw Error(ErrorCode::InconsistentSpec, "no template for layout " + std::string(to_string(spec.layout)));
  }
  const auto& layout = layout_it->second;
  std::mt19937_64 rng(spec.seed);

  std::vector<std::string> lines;
  Annotation ann;
  ann.screenshot_id = spec.screenshot_id;
  ann.true_structure = spec.structure;
  for (std::size_t i = 0; i < spec.n_posts; ++i) {
    if (i > 0) lines.insert(lines.end(), layout.between_posts.begin(), layout.between_posts.end());
    const auto& handle = spec.authors[i];
    const auto& name = content.display_names[fnv1a(text::to_lower_ascii(handle)) % content.display_names.size()];
    const auto& ts = spec.timestamps[i];
    auto body = body_lines(spec.bodies[i]);
    for (const auto& tmpl : layout.post) {
      if (tmpl == "{body}") {
        lines.insert(lines.end(), body.begin(), body.end());
        continue;
      }
      std::string line = tmpl;
      replace_all(line, "{name}", name);
      replace_all(line, "{handle}", handle);
      replace_all(line, "{time}", render_time(ts.time));
      for (std::size_t pos; (pos = line.find("{date:")) != std::string::npos;) {
        std::size_t close = line.find('}', pos);
        if (close == std::string::npos) throw Error(ErrorCode::InvalidConfig, "unterminated {date:");
        std::string style = line.substr(pos + 6, close - pos - 6);
        if (style == "any") style = pick(content.date_styles, rng);
        line.replace(pos, close - pos + 1, render_date(ts.date, style));
      }
      if (line.find("{views}") != std::string::npos) replace_all(line, "{views}", render_views(rng));
      lines.push_back(std::move(line));
    }
    std::string joined;
    for (const auto& b : body) joined += b + " ";
    ann.true_units.push_back({handle, ts.date, text::collapse_whitespace(joined)});
  }
  OcrDocument doc(spec.screenshot_id, lines, Sidecar{spec.screenshot_id + ".txt"});
  return {std::move(doc), std::move(ann)};
}

FixtureSpec random_fixture_spec(InternalStructure structure, std::uint64_t seed,
                                std::string screenshot_id, const FixtureContent& content) {
  if (structure == InternalStructure::P1An || structure == InternalStructure::Indeterminate) {
    throw Error(ErrorCode::InconsistentSpec,
                std::string("no fixture shape for ") + std::string(to_string(structure)));
  }
  std::mt19937_64 rng(seed);
  FixtureSpec spec;
  spec.screenshot_id = std::move(screenshot_id);
  spec.structure = structure;
  spec.seed = seed;
  spec.layout = uniform(rng, 0, 1) == 0 ? FixtureLayout::WebLightLike : FixtureLayout::MobileLightLike;
  spec.n_posts = structure == InternalStructure::P1A1 ? 1 : uniform(rng, 2, 4);

  std::vector<std::string> pool = content.handles;
  std::shuffle(pool.begin(), pool.end(), rng);
  for (std::size_t i = 0; i < spec.n_posts; ++i) {
    if (structure == InternalStructure::PnAn) {
      // the first two posts guarantee two distinct authors
      spec.authors.push_back(i < 2 ? pool[i] : pool[uniform(rng, 0, std::min<std::size_t>(pool.size(), 3) - 1)]);
    } else {
      spec.authors.push_back(pool[0]);
    }
  }
  CalendarDate day{static_cast<int>(uniform(rng, 2012, 2024)), static_cast<unsigned>(uniform(rng, 1, 12)),
                   static_cast<unsigned>(uniform(rng, 1, 28))};
  for (std::size_t i = 0; i < spec.n_posts; ++i) {
    TimeOfDay t{static_cast<unsigned>(uniform(rng, 0, 23)), static_cast<unsigned>(uniform(rng, 0, 59))};
    spec.timestamps.push_back({day, t});
    if (uniform(rng, 0, 2) == 0) {
      // replies sometimes land on a later day
      unsigned next = day.day + static_cast<unsigned>(uniform(rng, 1, 3));
      if (CalendarDate{day.year, day.month, next}.valid()) day.day = next;
    }
  }
  for (std::size_t i = 0; i < spec.n_posts; ++i) {
    std::size_t n = uniform(rng, 1, 3);
    std::string body;
    for (std::size_t k = 0; k < n; ++k) {
      if (k > 0) body += '\n';
      body += pick(content.sentences, rng);
    }
    spec.bodies.push_back(std::move(body));
  }
  return spec;
}

std::map<std::string, std::string> NoiseModel::default_confusions() {
  return {{"O", "0"}, {"0", "O"}, {"l", "1"}, {"1", "l"}, {"m", "rn"}};
}

OcrDocument perturb(const OcrDocument& doc, const NoiseModel& noise) {
  if (!(noise.substitution_rate >= 0.0 && noise.substitution_rate <= 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "substitution_rate must lie in [0, 1]");
  }
  for (const auto& [from, to] : noise.confusion_pairs) {
    if (to.find_first_of("\r\n") != std::string::npos) {
      throw Error(ErrorCode::InvalidConfig, "confusion replacement may not contain a line break");
    }
  }
  std::mt19937_64 rng(noise.seed);
  std::bernoulli_distribution flip(noise.substitution_rate);
  std::vector<std::string> lines;
  lines.reserve(doc.size());
  for (const auto& line : doc.lines()) {
    const std::string& s = line.text;
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size();) {
      std::size_t n = std::min(utf8_length(static_cast<unsigned char>(s[i])), s.size() - i);
      std::string ch = s.substr(i, n);
      auto it = noise.confusion_pairs.find(ch);
      if (it != noise.confusion_pairs.end() && flip(rng)) {
        out += it->second;
      } else {
        out += ch;
      }
      i += n;
    }
    lines.push_back(std::move(out));
  }
  return OcrDocument(doc.screenshot_id(), lines, doc.source());
}

CorpusRecipe CorpusRecipe::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::FileNotFound, "cannot open recipe " + path.string());
  CorpusRecipe r;
  std::optional<double> noise_rate;
  std::uint64_t noise_seed = 7;
  std::string line;
  std::size_t lineno = 0;
  auto bad = [&](const std::string& key) {
    throw Error(ErrorCode::InvalidConfig, "bad value for " + key, lineno, key);
  };
  while (std::getline(in, line)) {
    ++lineno;
    auto t = text::trim(line);
    if (t.empty() || t.front() == '#') continue;
    auto eq = t.find('=');
    if (eq == std::string_view::npos) throw Error(ErrorCode::InvalidConfig, "expected key = value", lineno);
    std::string key(text::trim(t.substr(0, eq)));
    std::string value(text::trim(t.substr(eq + 1)));
    try {
      if (key == "count") r.count = std::stoul(value);
      else if (key == "seed") r.seed = std::stoull(value);
      else if (key == "mobile_share") r.mobile_share = std::stod(value);
      else if (key == "noise_rate") noise_rate = std::stod(value);
      else if (key == "noise_seed") noise_seed = std::stoull(value);
      else if (key == "id_prefix") r.id_prefix = value;
      else if (key == "mix") {
        double a, b, c;
        if (std::sscanf(value.c_str(), "%lf , %lf , %lf", &a, &b, &c) != 3) bad(key);
        r.share_p1a1 = a, r.share_pnan = b, r.share_pna1 = c;
      } else {
        throw Error(ErrorCode::InvalidConfig, "unknown key", lineno, key);
      }
    } catch (const std::logic_error&) {
      bad(key);
    }
  }
  if (noise_rate) r.noise = NoiseModel{*noise_rate, NoiseModel::default_confusions(), noise_seed};
  return r;
}

std::map<InternalStructure, std::size_t> recipe_class_counts(const CorpusRecipe& recipe) {
  const std::pair<InternalStructure, double> shares[] = {{InternalStructure::P1A1, recipe.share_p1a1},
                                                         {InternalStructure::PnAn, recipe.share_pnan},
                                                         {InternalStructure::PnA1, recipe.share_pna1}};
  double sum = 0;
  for (const auto& [_, s] : shares) {
    if (s < 0) throw Error(ErrorCode::InvalidConfig, "class shares must be nonnegative");
    sum += s;
  }
  if (sum <= 0) throw Error(ErrorCode::InvalidConfig, "class shares sum to zero");
  std::map<InternalStructure, std::size_t> out;
  std::vector<std::pair<double, InternalStructure>> remainders;
  std::size_t assigned = 0;
  for (const auto& [cls, s] : shares) {
    double exact = static_cast<double>(recipe.count) * s / sum;
    auto whole = static_cast<std::size_t>(std::floor(exact + 1e-9));
    out[cls] = whole;
    assigned += whole;
    remainders.emplace_back(exact - static_cast<double>(whole), cls);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t i = 0; assigned < recipe.count; ++i, ++assigned) ++out[remainders[i % 3].second];
  return out;
}

std::vector<Fixture> generate_corpus(const CorpusRecipe& recipe, const FixtureContent& content) {
  std::vector<InternalStructure> classes;
  for (const auto& [cls, n] : recipe_class_counts(recipe)) classes.insert(classes.end(), n, cls);
  std::mt19937_64 rng(recipe.seed);
  std::shuffle(classes.begin(), classes.end(), rng);

  std::vector<Fixture> out;
  out.reserve(classes.size());
  std::bernoulli_distribution mobile(std::clamp(recipe.mobile_share, 0.0, 1.0));
  for (std::size_t i = 0; i < classes.size(); ++i) {
    char id[32];
    std::snprintf(id, sizeof id, "%04zu", i);
    std::uint64_t seed = recipe.seed ^ static_cast<std::uint64_t>(i);
    FixtureSpec spec = random_fixture_spec(classes[i], seed, recipe.id_prefix + id, content);
    spec.layout = mobile(rng) ? FixtureLayout::MobileLightLike : FixtureLayout::WebLightLike;
    Fixture f = generate_fixture(spec, content);
    if (recipe.noise) {
      NoiseModel n = *recipe.noise;
      n.seed = recipe.noise->seed ^ static_cast<std::uint64_t>(i);
      f.doc = perturb(f.doc, n);
    }
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace postshot
