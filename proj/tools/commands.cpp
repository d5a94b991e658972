#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "postshot/corpus.hpp"
#include "postshot/error.hpp"
#include "postshot/eval.hpp"
#include "postshot/fixtures.hpp"
#include "postshot/ocr.hpp"
#include "postshot/pipeline.hpp"
#include "postshot/query.hpp"

namespace postshot::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

struct PipelineOptions {
  std::string wordlist = default_wordlist_path().string();
  std::optional<std::size_t> top_n;
  std::string formats;

  Pipeline build() const {
    ExtractorConfig config = formats.empty() ? default_extractor_config() : ExtractorConfig::load(formats);
    return Pipeline(load_wordlist(wordlist, top_n, config), std::move(config));
  }
};

struct InputOptions {
  std::vector<std::string> sidecars;
  std::vector<std::string> images;
  EngineConfig engine;
};

struct Input {
  std::string id;
  fs::path path;
};

struct ItemResult {
  std::optional<ScreenshotParse> parse;
  std::optional<Error> failure;
};

void add_pipeline_options(CLI::App* cmd, PipelineOptions& o) {
  cmd->add_option("--wordlist", o.wordlist, "Common-word list, one token per line")->capture_default_str();
  cmd->add_option("--top-n", o.top_n, "Use only the first N wordlist lines");
  cmd->add_option("--formats", o.formats, "Date format and allowlist config file");
}

void add_input_options(CLI::App* cmd, InputOptions& o) {
  auto* s = cmd->add_option("--sidecars", o.sidecars, "OCR text files or directories of *.txt");
  auto* i = cmd->add_option("--images", o.images, "Screenshot images or directories of images");
  s->excludes(i);
  cmd->add_option("--engine-command", o.engine.command_template, "OCR command; {input} is the image path")
      ->capture_default_str();
  cmd->add_option("--engine-name", o.engine.name, "OCR engine name recorded in provenance")->capture_default_str();
  cmd->add_option("--engine-version-command", o.engine.version_template, "Command printing the engine version");
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path, std::ios::binary);
  out << content;
  out.close();
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
}

bool is_image_name(const fs::path& p) {
  static const std::set<std::string> exts = {".png", ".jpg", ".jpeg", ".gif", ".bmp", ".tif", ".tiff", ".webp"};
  std::string e = p.extension().string();
  std::transform(e.begin(), e.end(), e.begin(), [](unsigned char c) { return std::tolower(c); });
  return exts.count(e) > 0;
}

// Directories expand to their matching files; plain paths are kept even when
// missing so the failure is reported per item.
std::vector<Input> collect_inputs(const std::vector<std::string>& paths, bool images) {
  std::vector<Input> out;
  for (const auto& raw : paths) {
    fs::path p(raw);
    if (fs::is_directory(p)) {
      for (const auto& entry : fs::directory_iterator(p)) {
        if (!entry.is_regular_file()) continue;
        if (images ? is_image_name(entry.path()) : entry.path().extension() == ".txt") {
          out.push_back({entry.path().stem().string(), entry.path()});
        }
      }
    } else {
      out.push_back({p.stem().string(), p});
    }
  }
  std::sort(out.begin(), out.end(), [](const Input& a, const Input& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (out[i].id == out[i - 1].id) {
      throw Error(ErrorCode::InvalidConfig, "duplicate screenshot id " + out[i].id);
    }
  }
  if (out.empty()) throw Error(ErrorCode::InvalidConfig, "no inputs");
  return out;
}

std::vector<ItemResult> process_all(const std::vector<Input>& inputs, bool images, const EngineConfig& engine,
                                    const Pipeline& pipeline, unsigned jobs) {
  std::vector<ItemResult> results(inputs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < inputs.size();) {
      try {
        OcrDocument doc = images ? run_ocr(inputs[i].path, engine) : load_sidecar(inputs[i].path, inputs[i].id);
        results[i].parse = pipeline.run(doc);
      } catch (const Error& e) {
        results[i].failure = e;
      } catch (const std::exception& e) {
        results[i].failure = Error(ErrorCode::IoError, e.what());
      }
    }
  };
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(inputs.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < jobs; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return results;
}

std::map<std::string, Annotation> annotations_by_id(const fs::path& path) {
  std::map<std::string, Annotation> out;
  for (auto& a : load_annotations(path)) {
    std::string id = a.screenshot_id;
    if (!out.emplace(id, std::move(a)).second) {
      throw Error(ErrorCode::SchemaViolation, "duplicate annotation for " + id);
    }
  }
  return out;
}

EvalReport evaluate_against(const std::vector<ScreenshotParse>& parses, const fs::path& annotations,
                            const BodyMatch& how) {
  auto anns = annotations_by_id(annotations);
  std::vector<std::pair<ScreenshotParse, Annotation>> pairs;
  for (const auto& p : parses) {
    auto it = anns.find(p.screenshot_id);
    if (it == anns.end()) {
      throw Error(ErrorCode::MissingAnnotation, "no annotation for " + p.screenshot_id, 0, p.screenshot_id);
    }
    pairs.emplace_back(p, it->second);
  }
  return evaluate(std::move(pairs), how);
}

void write_report(const EvalReport& report, const fs::path& dir) {
  ordered_json j = report_to_json(report);
  validate_report_json(j);
  write_file(dir / "report.json", j.dump(2) + "\n");
  write_file(dir / "confusion.csv", confusion_csv(report.matrix));
}

std::string queries_text(const std::vector<ScreenshotParse>& parses, std::ostream& err) {
  std::string out;
  for (const auto& p : parses) {
    for (std::size_t i = 0; i < p.units.size(); ++i) {
      try {
        for (const auto& q : build_queries(p.units[i])) out += format_query_line(q) + "\n";
      } catch (const Error& e) {
        if (e.code() != ErrorCode::EmptyBody) throw;
        err << "warning: " << p.screenshot_id << " unit " << i << ": empty body, no queries\n";
      }
    }
  }
  return out;
}

std::optional<BodyMatch> parse_body_match(const std::string& mode, double threshold) {
  BodyMatch how;
  how.jaccard_threshold = threshold;
  if (mode == "exact") how.mode = BodyMatchMode::Exact;
  else if (mode == "normalized") how.mode = BodyMatchMode::Normalized;
  else if (mode == "jaccard") how.mode = BodyMatchMode::TokenJaccard;
  else return std::nullopt;
  return how;
}

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::FileNotFound:
    case ErrorCode::IoError:
    case ErrorCode::UnreadableImage:
      return kExitIo;
    default:
      return kExitConfig;
  }
}

}  // namespace

std::vector<std::string> apply_config_file(std::vector<std::string> args) {
  std::optional<std::string> config_path;
  std::vector<std::string> rest;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw Error(ErrorCode::InvalidConfig, "--config needs a file");
      config_path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      config_path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (!config_path) return rest;
  if (!fs::exists(*config_path)) throw Error(ErrorCode::FileNotFound, "cannot open config " + *config_path);

  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigTOML().from_file(*config_path);
  } catch (const CLI::Error& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("config file: ") + e.what());
  }
  std::set<std::string> keys;
  for (const auto& item : items) {
    if (item.name == "++" || item.name == "--") continue;
    keys.insert("--" + item.name);
  }
  // Drop the command-line occurrences of every configured option.
  std::vector<std::string> kept;
  for (std::size_t i = 0; i < rest.size(); ++i) {
    const std::string& a = rest[i];
    std::string key = a.substr(0, a.find('='));
    if (i > 0 && keys.count(key)) {
      if (a.find('=') == std::string::npos) {
        while (i + 1 < rest.size() && rest[i + 1].rfind("-", 0) != 0) ++i;
      }
      continue;
    }
    kept.push_back(a);
  }
  for (const auto& item : items) {
    if (item.name == "++" || item.name == "--") continue;
    if (item.inputs.size() == 1) {
      kept.push_back("--" + item.name + "=" + item.inputs.front());
    } else {
      kept.push_back("--" + item.name);
      kept.insert(kept.end(), item.inputs.begin(), item.inputs.end());
    }
  }
  return kept;
}

int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Screenshot post parsing, classification and evaluation"};
  app.name(args.empty() ? "postshot" : fs::path(args.front()).filename().string());
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  std::string config_help;
  app.add_option("--config", config_help, "TOML/INI file; its keys override the same flags");

  // extract
  auto* extract = app.add_subcommand("extract", "Parse screenshots into per-post units");
  PipelineOptions ex_pipe;
  InputOptions ex_in;
  std::string ex_out;
  bool ex_queries = false;
  std::string ex_annotations;
  unsigned ex_jobs = std::max(1u, std::thread::hardware_concurrency());
  add_input_options(extract, ex_in);
  add_pipeline_options(extract, ex_pipe);
  extract->add_option("--out", ex_out, "Output directory")->required();
  extract->add_flag("--queries", ex_queries, "Also write queries.tsv");
  extract->add_option("--annotations", ex_annotations, "Annotation JSONL; also writes report.json");
  extract->add_option("--jobs,-j", ex_jobs, "Worker threads")->check(CLI::Range(1u, 1024u));

  // evaluate
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Score parses against annotations");
  PipelineOptions ev_pipe;
  InputOptions ev_in;
  std::string ev_parses, ev_annotations, ev_out, ev_match = "normalized";
  double ev_threshold = 0.8;
  unsigned ev_jobs = std::max(1u, std::thread::hardware_concurrency());
  auto* ev_parses_opt = evaluate_cmd->add_option("--parses", ev_parses, "parses.jsonl from extract");
  add_input_options(evaluate_cmd, ev_in);
  ev_parses_opt->excludes("--sidecars")->excludes("--images");
  add_pipeline_options(evaluate_cmd, ev_pipe);
  evaluate_cmd->add_option("--annotations", ev_annotations, "Annotation JSONL")->required();
  evaluate_cmd->add_option("--out", ev_out, "Output directory for report.json and confusion.csv")->required();
  evaluate_cmd->add_option("--body-match", ev_match, "exact, normalized or jaccard")->capture_default_str();
  evaluate_cmd->add_option("--jaccard-threshold", ev_threshold)->check(CLI::Range(0.0, 1.0))->capture_default_str();
  evaluate_cmd->add_option("--jobs,-j", ev_jobs, "Worker threads")->check(CLI::Range(1u, 1024u));

  // queries
  auto* queries = app.add_subcommand("queries", "Emit search queries for parsed units");
  std::string q_parses, q_out;
  queries->add_option("--parses", q_parses, "parses.jsonl from extract")->required();
  queries->add_option("--out", q_out, "Output file (default stdout)");

  // gen-fixtures
  auto* gen = app.add_subcommand("gen-fixtures", "Write a synthetic sidecar corpus with annotations");
  std::string g_out, g_recipe, g_content;
  std::optional<std::uint64_t> g_seed;
  bool g_seed_default = false;
  std::optional<std::size_t> g_count;
  std::optional<double> g_noise_rate;
  std::optional<std::uint64_t> g_noise_seed;
  gen->add_option("--out", g_out, "Output directory")->required();
  gen->add_option("--recipe", g_recipe, "Recipe file (count, seed, mix, mobile_share, noise_rate, noise_seed)");
  gen->add_option("--content", g_content, "Layout and content pool JSON");
  auto* seed_opt = gen->add_option("--seed", g_seed, "Corpus seed");
  gen->add_flag("--seed-default", g_seed_default, "Use the recipe seed")->excludes(seed_opt);
  gen->add_option("--count", g_count, "Number of fixtures");
  gen->add_option("--noise-rate", g_noise_rate, "OCR confusion rate")->check(CLI::Range(0.0, 1.0));
  gen->add_option("--noise-seed", g_noise_seed, "OCR noise seed");

  // tally
  auto* tally = app.add_subcommand("tally", "Count captured screenshots by mode and platform");
  std::string t_manifest, t_csv;
  tally->add_option("--manifest", t_manifest, "Capture manifest JSONL")->required();
  tally->add_option("--csv", t_csv, "Also write the table as CSV");

  try {
    args = apply_config_file(std::move(args));
    std::vector<std::string> rev(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }

  try {
    if (*extract) {
      if (ex_in.sidecars.empty() == ex_in.images.empty()) {
        throw Error(ErrorCode::InvalidConfig, "give exactly one of --sidecars or --images");
      }
      bool images = !ex_in.images.empty();
      auto inputs = collect_inputs(images ? ex_in.images : ex_in.sidecars, images);
      Pipeline pipeline = ex_pipe.build();
      fs::path dir(ex_out);
      auto results = process_all(inputs, images, ex_in.engine, pipeline, ex_jobs);

      std::string parses_jsonl, failures_jsonl;
      std::vector<ScreenshotParse> parses;
      for (std::size_t i = 0; i < results.size(); ++i) {
        if (results[i].parse) {
          ordered_json j = parse_to_json(*results[i].parse);
          parses_jsonl += j.dump() + "\n";
          write_file(dir / "parses" / (inputs[i].id + ".json"), j.dump(2) + "\n");
          parses.push_back(std::move(*results[i].parse));
        } else {
          const Error& e = *results[i].failure;
          ordered_json f = {{"screenshot_id", inputs[i].id},
                            {"input", inputs[i].path.string()},
                            {"error", std::string(to_string(e.code()))},
                            {"message", e.what()}};
          failures_jsonl += f.dump() + "\n";
        }
      }
      write_file(dir / "parses.jsonl", parses_jsonl);
      write_file(dir / "failures.jsonl", failures_jsonl);
      if (ex_queries) write_file(dir / "queries.tsv", queries_text(parses, err));
      if (!ex_annotations.empty()) {
        EvalReport report = evaluate_against(parses, ex_annotations, BodyMatch{});
        write_report(report, dir);
      }
      out << "processed " << inputs.size() << " inputs: " << parses.size() << " parsed, "
          << inputs.size() - parses.size() << " failed\n";
      return kExitOk;
    }

    if (*evaluate_cmd) {
      auto how = parse_body_match(ev_match, ev_threshold);
      if (!how) throw Error(ErrorCode::InvalidConfig, "unknown --body-match " + ev_match, 0, "body-match");
      std::vector<ScreenshotParse> parses;
      if (!ev_parses.empty()) {
        parses = load_parses(ev_parses);
      } else {
        if (ev_in.sidecars.empty() == ev_in.images.empty()) {
          throw Error(ErrorCode::InvalidConfig, "give --parses, --sidecars or --images");
        }
        bool images = !ev_in.images.empty();
        auto inputs = collect_inputs(images ? ev_in.images : ev_in.sidecars, images);
        auto results = process_all(inputs, images, ev_in.engine, ev_pipe.build(), ev_jobs);
        for (std::size_t i = 0; i < results.size(); ++i) {
          if (results[i].failure) throw *results[i].failure;
          parses.push_back(std::move(*results[i].parse));
        }
      }
      std::sort(parses.begin(), parses.end(),
                [](const auto& a, const auto& b) { return a.screenshot_id < b.screenshot_id; });
      if (parses.empty()) throw Error(ErrorCode::EmptyInput, "no parses to evaluate");
      EvalReport report = evaluate_against(parses, ev_annotations, *how);
      write_report(report, ev_out);
      out << format_metrics_table(report);
      return kExitOk;
    }

    if (*queries) {
      std::string text = queries_text(load_parses(q_parses), err);
      if (q_out.empty()) {
        out << text;
      } else {
        write_file(q_out, text);
      }
      return kExitOk;
    }

    if (*gen) {
      if (!g_seed && !g_seed_default) {
        throw Error(ErrorCode::InvalidConfig, "gen-fixtures needs --seed <n> or --seed-default", 0, "seed");
      }
      CorpusRecipe recipe = g_recipe.empty() ? CorpusRecipe{} : CorpusRecipe::load(g_recipe);
      if (g_seed) recipe.seed = *g_seed;
      if (g_count) recipe.count = *g_count;
      if (g_noise_rate || g_noise_seed) {
        NoiseModel n = recipe.noise.value_or(NoiseModel{0.0, NoiseModel::default_confusions(), 7});
        if (g_noise_rate) n.substitution_rate = *g_noise_rate;
        if (g_noise_seed) n.seed = *g_noise_seed;
        recipe.noise = n;
      }
      FixtureContent content = g_content.empty() ? default_fixture_content() : load_fixture_content(g_content);
      auto corpus = generate_corpus(recipe, content);
      fs::path dir(g_out);
      std::vector<Annotation> anns;
      std::string manifest;
      for (const auto& f : corpus) {
        fs::path sidecar = fs::path("sidecars") / (f.doc.screenshot_id() + ".txt");
        write_file(dir / sidecar, "");
        save_sidecar(f.doc, dir / sidecar);
        anns.push_back(f.annotation);
        manifest += ordered_json{{"screenshot_id", f.doc.screenshot_id()},
                                 {"sidecar", sidecar.string()},
                                 {"true_structure", std::string(to_string(f.annotation.true_structure))}}
                        .dump() +
                    "\n";
      }
      save_annotations(anns, dir / "annotations.jsonl");
      write_file(dir / "fixtures.jsonl", manifest);
      out << "wrote " << corpus.size() << " fixtures to " << dir.string() << "\n";
      return kExitOk;
    }

    if (*tally) {
      ManifestTally t = tally_manifest(load_manifest(t_manifest));
      out << t.format_table();
      if (!t_csv.empty()) write_file(t_csv, t.to_csv());
      return kExitOk;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitOk;
}

}  // namespace postshot::cli
