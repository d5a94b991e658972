// Acceptance checks, one line per criterion.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>

#include "commands.hpp"
#include "postshot/corpus.hpp"
#include "postshot/error.hpp"
#include "postshot/eval.hpp"
#include "postshot/fixtures.hpp"
#include "postshot/pipeline.hpp"
#include "postshot/query.hpp"
#include "postshot/text.hpp"
#include "support.hpp"

using namespace postshot;
using IS = InternalStructure;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (pass) detail.clear();
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double a, double b = 0) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

const Pipeline& pipeline() {
  static const Pipeline p(testing::words());
  return p;
}

EvalReport run_corpus(const std::vector<Fixture>& corpus) {
  std::vector<std::pair<ScreenshotParse, Annotation>> results;
  results.reserve(corpus.size());
  for (const auto& f : corpus) results.emplace_back(pipeline().run(f.doc), f.annotation);
  return evaluate(std::move(results));
}

// 1
Outcome published_score_oracle() {
  Outcome o;
  auto t0 = Clock::now();
  auto solutions = testing::published_score_solutions();
  o.require(!solutions.empty(), "no integer matrix satisfies the printed constraints");
  const IS cls[3] = {IS::PnAn, IS::PnA1, IS::P1A1};
  const double printed_f1[3] = {0.81, 0.60, 0.96};
  for (const auto& sol : solutions) {
    std::vector<StructurePair> pairs;
    for (int t = 0; t < 3; ++t)
      for (int p = 0; p < 3; ++p)
        for (int k = 0; k < sol[t][p]; ++k) pairs.push_back({cls[t], cls[p]});
    auto m = confusion_matrix(pairs);
    o.require(m.at(IS::PnAn, IS::PnAn) == 13 && m.row_sum(IS::PnAn) == 18 && m.column_sum(IS::PnAn) == 14,
              "PnAn counts");
    o.require(m.at(IS::PnA1, IS::PnA1) == 3 && m.row_sum(IS::PnA1) == 4 && m.column_sum(IS::PnA1) == 6,
              "PnA1 counts");
    o.require(m.at(IS::P1A1, IS::P1A1) == 52 && m.row_sum(IS::P1A1) == 53 && m.column_sum(IS::P1A1) == 55,
              "P1A1 counts");
    auto pc = per_class_metrics(m);
    for (int c = 0; c < 3; ++c) {
      const auto& x = pc[cls[c]];
      o.require(round_half_up(x.precision) == testing::kPublishedScores[c].precision, std::string(to_string(cls[c])) + " precision");
      o.require(round_half_up(x.recall) == testing::kPublishedScores[c].recall, std::string(to_string(cls[c])) + " recall");
      o.require(round_half_up(x.f1) == printed_f1[c], std::string(to_string(cls[c])) + " f1");
      o.require(x.support == static_cast<std::size_t>(testing::kPublishedScores[c].support), "support");
    }
    auto mm = macro_metrics(pc);
    o.require(round_half_up(mm.precision) == 0.79, "macro precision");
    o.require(round_half_up(mm.recall) == 0.82, "macro recall");
    o.require(round_half_up(mm.f1) == 0.80, "macro f1");
  }
  double secs = seconds_since(t0);
  o.require(secs < 1.0, fmt("took %.3f s", secs));
  if (o.pass) {
    o.detail = std::to_string(solutions.size()) + " integer solution(s), all reproduce 0.93/0.72/0.81, "
               "0.50/0.75/0.60, 0.95/0.98/0.96, 0.79/0.82/0.80" + fmt(" (%.3f s)", secs);
  }
  return o;
}

// 2
Outcome grouping_oracle() {
  Outcome o;
  std::vector<std::pair<bool, IS>> verdicts;
  for (int i = 0; i < 75; ++i) verdicts.push_back({i < 55, i < 53 ? IS::P1A1 : i < 71 ? IS::PnAn : IS::PnA1});
  auto g = grouping_accuracy(verdicts);
  o.require(std::abs(g.overall - 0.7333) <= 0.0001, fmt("overall %.6f", g.overall));
  if (o.pass) o.detail = fmt("55/75 = %.4f", g.overall);
  return o;
}

// 3 and 4 share the clean baseline.
struct CleanBaseline {
  double macro_f1 = 0;
  double grouping = 0;
};

Outcome clean_corpus(CleanBaseline& baseline) {
  Outcome o;
  auto t0 = Clock::now();
  CorpusRecipe recipe;
  auto corpus = generate_corpus(recipe);
  auto report = run_corpus(corpus);
  double secs = seconds_since(t0);
  auto counts = recipe_class_counts(recipe);
  o.require(corpus.size() == 200, "corpus size");
  o.require(counts[IS::P1A1] == 140 && counts[IS::PnAn] == 48 && counts[IS::PnA1] == 12, "class mix");
  o.require(round_half_up(report.macro.f1) == 1.00, fmt("macro-F1 %.4f", report.macro.f1));
  o.require(report.grouping.overall == 1.0, fmt("grouping %.4f", report.grouping.overall));
  o.require(secs < 10.0, fmt("took %.2f s", secs));
  baseline = {report.macro.f1, report.grouping.overall};
  if (o.pass) {
    o.detail = fmt("200 fixtures, macro-F1 %.2f, grouping %.2f", report.macro.f1, report.grouping.overall) +
               fmt(" (%.2f s)", secs);
  }
  return o;
}

Outcome noisy_corpus(const CleanBaseline& baseline) {
  Outcome o;
  CorpusRecipe recipe;
  recipe.noise = NoiseModel{0.05, NoiseModel::default_confusions(), 7};
  std::size_t crashes = 0;
  std::vector<std::pair<ScreenshotParse, Annotation>> results;
  for (const auto& f : generate_corpus(recipe)) {
    try {
      results.emplace_back(pipeline().run(f.doc), f.annotation);
    } catch (const std::exception&) {
      ++crashes;
    }
  }
  o.require(crashes == 0, std::to_string(crashes) + " crashes");
  try {
    auto report = evaluate(results);
    validate_report_json(nlohmann::ordered_json::parse(report_to_json(report).dump(2)));
    o.require(report.macro.f1 <= baseline.macro_f1, fmt("macro-F1 %.4f above clean %.4f", report.macro.f1, baseline.macro_f1));
    o.require(report.grouping.overall <= baseline.grouping,
              fmt("grouping %.4f above clean %.4f", report.grouping.overall, baseline.grouping));
    if (o.pass) {
      o.detail = fmt("0 crashes, schema-valid report, macro-F1 %.2f, ", report.macro.f1) +
                 fmt("grouping %.2f (both <= clean)", report.grouping.overall);
    }
  } catch (const Error& e) {
    o.require(false, e.what());
  }
  return o;
}

// 5
Outcome extraction_boundaries() {
  Outcome o;
  const std::string chars = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_";
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<std::size_t> pick(0, chars.size() - 1);
  for (std::size_t len = 1; len <= 24; ++len) {
    for (int trial = 0; trial < 50; ++trial) {
      std::string h;
      for (std::size_t i = 0; i < len; ++i) h += chars[pick(rng)];
      auto m = find_handle_mentions(testing::doc_of({"x @" + h + " y"}));
      bool accepted = m.size() == 1 && m[0].handle == h;
      bool expected = len >= 4 && len <= 15;
      o.require(accepted == expected, "handle length " + std::to_string(len));
      if (accepted != expected) break;
    }
  }

  // A token disqualifies a line exactly when it is listed and not allowlisted.
  const ExtractorConfig& cfg = default_extractor_config();
  const std::vector<std::string> tokens = {"views", "likes", "am", "pm", "june", "monday", "quote", "replies",
                                           "the", "support", "banana", "zebra", "1.2m", "happen"};
  for (int trial = 0; trial < 400; ++trial) {
    std::unordered_set<std::string> listed;
    for (const auto& t : tokens) {
      if (rng() % 2) listed.insert(t);
    }
    WordList wl(listed, "mem");
    std::vector<std::string> extra;
    bool disqualify = false;
    for (int k = 0; k < 3; ++k) {
      const auto& t = tokens[rng() % tokens.size()];
      extra.push_back(t);
      disqualify |= listed.count(t) && !cfg.exempt(t);
    }
    std::string tail = " " + extra[0] + " " + extra[1] + ", " + extra[2];
    auto doc = testing::doc_of({"9:02 AM \xC2\xB7 Jun 3, 2024 \xC2\xB7" + tail, "Vrell @ilsa_krunow" + tail});
    auto d = filter_meaningful_dates(find_timestamp_mentions(doc), doc, wl);
    auto a = filter_author_handles(find_handle_mentions(doc), doc, wl);
    bool ok = d.size() == 1 && a.size() == 1 && d[0].meaningful == !disqualify && a[0].is_author == !disqualify;
    o.require(ok, "disqualification rule on \"" + tail + "\"");
    if (!ok) break;
  }

  const CalendarDate want{2024, 6, 3};
  for (const char* form : {"Jun 3, 2024", "3 Jun 2024", "06/03/2024", "2024-06-03"}) {
    auto m = find_timestamp_mentions(testing::doc_of({form}));
    o.require(m.size() == 1 && m[0].date == want, std::string("date form ") + form);
  }
  if (o.pass) {
    o.detail = "handles accepted exactly for lengths 4-15, disqualification matches the rule on 400 random lines, "
               "4 date forms -> 2024-06-03";
  }
  return o;
}

// 6
Outcome partition_property() {
  Outcome o;
  std::mt19937_64 rng(2024);
  const IS shapes[] = {IS::P1A1, IS::PnA1, IS::PnAn};
  std::size_t docs = 0, units = 0;
  for (int i = 0; i < 1000 && o.pass; ++i) {
    auto spec = random_fixture_spec(shapes[rng() % 3], rng(), "prop-" + std::to_string(i));
    OcrDocument doc = generate_fixture(spec).doc;
    if (i % 2) doc = perturb(doc, NoiseModel{0.1, NoiseModel::default_confusions(), rng()});
    auto handles = filter_author_handles(find_handle_mentions(doc), doc, testing::words());
    auto dates = filter_meaningful_dates(find_timestamp_mentions(doc), doc, testing::words());
    auto parse = group_posts(doc, handles, dates);
    ++docs;
    std::size_t authors = std::count_if(handles.begin(), handles.end(), [](const auto& h) { return h.is_author; });
    std::string where = " in " + spec.screenshot_id;
    if (authors == 0) {
      o.require(parse.units.size() == 1 && parse.has(ParseFlag::NoAuthors), "NoAuthors unit" + where);
    } else {
      o.require(parse.units.size() == authors, "unit count != author mentions" + where);
    }
    std::vector<int> owner(doc.size(), 0);
    for (const auto& u : parse.units) {
      for (std::size_t l = u.span.first_line; l <= u.span.last_line && l < doc.size(); ++l) ++owner[l];
    }
    o.require(std::all_of(owner.begin(), owner.end(), [](int c) { return c == 1; }),
              "spans not a partition" + where);
    for (const auto& d : dates) {
      if (!d.meaningful) continue;
      int holders = 0;
      for (const auto& u : parse.units) holders += static_cast<int>(std::count(u.dates.begin(), u.dates.end(), d));
      o.require(holders == 1, "date held by " + std::to_string(holders) + " units" + where);
    }
    units += parse.units.size();
  }
  if (o.pass) o.detail = std::to_string(docs) + " documents, " + std::to_string(units) + " units";
  return o;
}

// 7
Outcome query_contract() {
  Outcome o;
  std::size_t n_units = 0;
  for (const auto& f : generate_corpus(CorpusRecipe{})) {
    auto parse = pipeline().run(f.doc);
    for (const auto& u : parse.units) {
      auto qs = build_queries(u, f.doc);
      std::string body = text::collapse_whitespace(unit_body_text(u, f.doc));
      o.require(qs.size() == 3, "target count");
      std::set<QueryTarget> targets;
      for (const auto& q : qs) {
        targets.insert(q.target);
        o.require(text::grapheme_count(q.text_prefix) <= 50, "prefix over 50 characters");
        o.require(body.compare(0, q.text_prefix.size(), q.text_prefix) == 0, "prefix not a prefix of the body");
        o.require(q.text_prefix.find_first_of("\r\n") == std::string::npos, "line break in prefix");
      }
      o.require(targets.size() == 3, "duplicate targets");
      ++n_units;
    }
  }
  if (o.pass) o.detail = std::to_string(n_units) + " units, 3 targets each, prefixes <= 50 characters";
  return o;
}

// 8
Outcome round_trips() {
  Outcome o;
  testing::TempDir dir("accept-rt");
  std::vector<Annotation> anns;
  for (const auto& f : generate_corpus(CorpusRecipe{})) anns.push_back(f.annotation);
  save_annotations(anns, dir / "a.jsonl");
  auto loaded = load_annotations(dir / "a.jsonl");
  o.require(loaded == anns, "annotations differ after load");
  save_annotations(loaded, dir / "a2.jsonl");
  o.require(testing::read_text(dir / "a.jsonl") == testing::read_text(dir / "a2.jsonl"), "annotation bytes differ");

  std::vector<CaptureManifestEntry> manifest;
  const CaptureStatus statuses[] = {CaptureStatus::Ok, CaptureStatus::BrokenUrl, CaptureStatus::Skipped};
  for (int i = 0; i < 64; ++i) {
    CaptureManifestEntry e;
    e.screenshot_id = "cap-" + std::to_string(i);
    Platform p = kAllPlatforms[i % 4];
    e.post_url = p == Platform::Instagram ? build_url(p, "C" + std::to_string(i)) : build_url(p, std::to_string(1000 + i), "acct_" + std::to_string(i));
    e.mode = kAllModes[(i / 4) % 4];
    e.status = statuses[i % 3];
    if (e.status == CaptureStatus::Ok) e.image_path = "img/" + e.screenshot_id + ".png";
    e.captured_at = "2024-06-03T09:02:" + std::string(i % 60 < 10 ? "0" : "") + std::to_string(i % 60) + "Z";
    manifest.push_back(e);
  }
  save_manifest(manifest, dir / "m.jsonl");
  auto mloaded = load_manifest(dir / "m.jsonl");
  o.require(mloaded == manifest, "manifest differs after load");
  save_manifest(mloaded, dir / "m2.jsonl");
  o.require(testing::read_text(dir / "m.jsonl") == testing::read_text(dir / "m2.jsonl"), "manifest bytes differ");

  std::string list =
      "https://twitter.com/BMW_LifeMorals/status/241301682477232128\n"
      "https://twitter.com/BMW_LifeMorals/status/253567721424445441\n"
      "https://twitter.com/BMW_LifeMorals/status/257181645101211649\n"
      "https://twitter.com/BMW_LifeMorals/status/261522710146977792\n"
      "https://twitter.com/BMW_LifeMorals/status/261995784894029824\n"
      "https://twitter.com/BMW_LifeMorals/status/269467393900830721\n"
      "https://twitter.com/BMW_LifeMorals/status/272380339362623488\n"
      "https://twitter.com/BMW_LifeMorals/status/272402989015244801\n"
      "https://twitter.com/BMW_LifeMorals/status/272873624023732224\n";
  testing::write_text(dir / "t.txt", list);
  testing::write_text(dir / "i.txt", "https://www.instagram.com/p/Cxy12ab/\nhttps://www.instagram.com/p/B_7-xQ9lZ1a/\n");
  std::size_t urls = 0;
  for (auto [file, platform] : {std::pair{"t.txt", Platform::Twitter}, std::pair{"i.txt", Platform::Instagram}}) {
    for (const auto& u : load_url_list(dir / file, platform)) {
      o.require(u.post_id.has_value(), "no post id in " + u.url);
      if (u.post_id) o.require(build_url(u.platform, *u.post_id, u.account).url == u.url, "rebuild of " + u.url);
      ++urls;
    }
  }
  if (o.pass) {
    o.detail = std::to_string(anns.size()) + " annotations, " + std::to_string(manifest.size()) +
               " manifest entries byte-identical; build_url(parse(u)) == u for " + std::to_string(urls) + " URLs";
  }
  return o;
}

// 9
Outcome parallel_determinism() {
  Outcome o;
  testing::TempDir dir("accept-par");
  auto run_cli = [&](std::vector<std::string> args) {
    args.insert(args.begin(), "postshot");
    std::ostringstream out, err;
    int code = cli::run(args, out, err);
    o.require(code == 0, "exit " + std::to_string(code) + ": " + err.str());
  };
  run_cli({"gen-fixtures", "--out", (dir / "fx").string(), "--seed-default", "--noise-rate", "0.02"});
  testing::write_text(dir / "fx/sidecars/zz-broken.txt", "bad \xFF\n");
  for (std::string jobs : {"1", "8"}) {
    run_cli({"extract", "--sidecars", (dir / "fx/sidecars").string(), "--out", (dir / ("j" + jobs)).string(), "--jobs",
         jobs, "--queries", "--annotations", (dir / "fx/annotations.jsonl").string()});
  }
  std::size_t files = 0;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(dir / "j1")) {
    if (!entry.is_regular_file()) continue;
    auto rel = std::filesystem::relative(entry.path(), dir / "j1");
    o.require(testing::read_text(entry.path()) == testing::read_text(dir / "j8" / rel), "differs: " + rel.string());
    ++files;
  }
  std::size_t files8 = 0;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(dir / "j8")) files8 += entry.is_regular_file();
  o.require(files == files8, "file sets differ");
  if (o.pass) o.detail = std::to_string(files) + " output files byte-identical for --jobs 1 and --jobs 8";
  return o;
}

}  // namespace

int main() {
  int failed = 0;
  auto report = [&](int n, const char* name, const std::function<Outcome()>& fn) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    std::printf("criterion %d %s: %s - %s\n", n, o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  };
  CleanBaseline baseline;
  report(1, "published score arithmetic oracle", published_score_oracle);
  report(2, "grouping-accuracy oracle", grouping_oracle);
  report(3, "clean-corpus exactness", [&] { return clean_corpus(baseline); });
  report(4, "noise degradation", [&] { return noisy_corpus(baseline); });
  report(5, "extraction rule boundaries", extraction_boundaries);
  report(6, "partition property", partition_property);
  report(7, "query contract", query_contract);
  report(8, "round-trips", round_trips);
  report(9, "determinism under parallelism", parallel_determinism);
  std::printf("%d of 9 criteria passed\n", 9 - failed);
  return failed == 0 ? 0 : 1;
}
