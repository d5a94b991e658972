#include "postshot/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "postshot/error.hpp"
#include "postshot/text.hpp"

namespace postshot {

std::optional<std::size_t> ConfusionMatrix::index_of(InternalStructure s) const {
  auto it = std::find(classes.begin(), classes.end(), s);
  if (it == classes.end()) return std::nullopt;
  return static_cast<std::size_t>(it - classes.begin());
}

std::size_t ConfusionMatrix::at(InternalStructure truth, InternalStructure predicted) const {
  auto t = index_of(truth);
  auto p = index_of(predicted);
  return (t && p) ? counts[*t][*p] : 0;
}

std::size_t ConfusionMatrix::row_sum(InternalStructure truth) const {
  auto t = index_of(truth);
  if (!t) return 0;
  std::size_t s = 0;
  for (auto c : counts[*t]) s += c;
  return s;
}

std::size_t ConfusionMatrix::column_sum(InternalStructure predicted) const {
  auto p = index_of(predicted);
  if (!p) return 0;
  std::size_t s = 0;
  for (const auto& row : counts) s += row[*p];
  return s;
}

std::size_t ConfusionMatrix::total() const {
  std::size_t s = 0;
  for (const auto& row : counts) {
    for (auto c : row) s += c;
  }
  return s;
}

ConfusionMatrix confusion_matrix(std::span<const StructurePair> pairs) {
  std::set<InternalStructure> seen;
  for (const auto& [t, p] : pairs) {
    seen.insert(t);
    seen.insert(p);
  }
  ConfusionMatrix m;
  for (auto s : kAllStructures) {
    if (seen.count(s)) m.classes.push_back(s);
  }
  m.counts.assign(m.classes.size(), std::vector<std::size_t>(m.classes.size(), 0));
  for (const auto& [t, p] : pairs) ++m.counts[*m.index_of(t)][*m.index_of(p)];
  return m;
}

namespace {
double harmonic(double a, double b) { return (a + b) > 0 ? 2 * a * b / (a + b) : 0.0; }
double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}
}  // namespace

PerClassMetrics per_class_metrics(const ConfusionMatrix& m) {
  PerClassMetrics out;
  for (auto c : m.classes) {
    ClassMetrics cm;
    std::size_t hit = m.at(c, c);
    cm.precision = ratio(hit, m.column_sum(c));
    cm.recall = ratio(hit, m.row_sum(c));
    cm.f1 = harmonic(cm.precision, cm.recall);
    cm.support = m.row_sum(c);
    out[c] = cm;
  }
  return out;
}

MacroMetrics macro_metrics(const PerClassMetrics& per_class) {
  MacroMetrics out;
  std::size_t n = 0;
  for (const auto& [c, m] : per_class) {
    if (m.support == 0) continue;
    out.precision += m.precision;
    out.recall += m.recall;
    out.mean_f1 += m.f1;
    ++n;
  }
  if (n == 0) throw Error(ErrorCode::NoSupportedClasses, "no class has nonzero support");
  out.precision /= static_cast<double>(n);
  out.recall /= static_cast<double>(n);
  out.mean_f1 /= static_cast<double>(n);
  out.f1 = harmonic(out.precision, out.recall);
  return out;
}

double round_half_up(double value, int decimals) {
  double scale = std::pow(10.0, decimals);
  // The epsilon absorbs binary representation error at exact halves (0.125 -> 0.13).
  return std::floor(value * scale + 0.5 + 1e-9) / scale;
}

namespace {

std::set<std::string> token_set(std::string_view s) {
  std::set<std::string> out;
  for (auto t : text::split_whitespace(s)) out.emplace(t);
  return out;
}

std::string strip_at(std::string_view handle) {
  auto t = text::trim(handle);
  if (!t.empty() && t.front() == '@') t.remove_prefix(1);
  return text::to_lower_ascii(t);
}

}  // namespace

bool bodies_match(std::string_view extracted, std::string_view annotated, const BodyMatch& how) {
  switch (how.mode) {
    case BodyMatchMode::Exact:
      return extracted == annotated;
    case BodyMatchMode::Normalized:
      return text::normalize_body(extracted) == text::normalize_body(annotated);
    case BodyMatchMode::TokenJaccard: {
      auto a = token_set(text::normalize_body(extracted));
      auto b = token_set(text::normalize_body(annotated));
      if (a.empty() && b.empty()) return true;
      std::size_t inter = 0;
      for (const auto& t : a) inter += b.count(t);
      std::size_t uni = a.size() + b.size() - inter;
      return static_cast<double>(inter) / static_cast<double>(uni) >= how.jaccard_threshold;
    }
  }
  return false;
}

bool grouping_correct(const ScreenshotParse& parse, const Annotation& ann, const BodyMatch& how) {
  if (parse.screenshot_id != ann.screenshot_id) {
    throw Error(ErrorCode::IdMismatch, parse.screenshot_id + " vs " + ann.screenshot_id);
  }
  if (parse.units.size() != ann.true_units.size()) return false;
  for (std::size_t i = 0; i < parse.units.size(); ++i) {
    const auto& got = parse.units[i];
    const auto& want = ann.true_units[i];
    if (!got.author || strip_at(got.author->handle) != strip_at(want.author)) return false;
    std::optional<CalendarDate> got_date;
    if (got.timestamp) got_date = got.timestamp->date;
    if (got_date != want.date) return false;
    if (!bodies_match(got.body, want.body, how)) return false;
  }
  return true;
}

GroupingAccuracy grouping_accuracy(std::span<const std::pair<bool, InternalStructure>> verdicts) {
  if (verdicts.empty()) throw Error(ErrorCode::EmptyInput, "no screenshots to score");
  GroupingAccuracy out;
  std::map<InternalStructure, std::pair<std::size_t, std::size_t>> by_class;
  for (const auto& [ok, cls] : verdicts) {
    out.correct += ok ? 1 : 0;
    auto& [c, n] = by_class[cls];
    c += ok ? 1 : 0;
    ++n;
  }
  out.total = verdicts.size();
  out.overall = ratio(out.correct, out.total);
  for (const auto& [cls, cn] : by_class) out.per_class[cls] = ratio(cn.first, cn.second);
  return out;
}

GroupingAccuracy grouping_accuracy(std::span<const std::pair<ScreenshotParse, Annotation>> results,
                                   const BodyMatch& how) {
  std::vector<std::pair<bool, InternalStructure>> verdicts;
  verdicts.reserve(results.size());
  for (const auto& [parse, ann] : results) {
    verdicts.emplace_back(grouping_correct(parse, ann, how), ann.true_structure);
  }
  return grouping_accuracy(verdicts);
}

EvalReport evaluate(std::vector<std::pair<ScreenshotParse, Annotation>> results,
                    const BodyMatch& how) {
  std::sort(results.begin(), results.end(), [](const auto& a, const auto& b) {
    return a.second.screenshot_id < b.second.screenshot_id;
  });
  std::vector<StructurePair> pairs;
  for (const auto& [parse, ann] : results) pairs.emplace_back(ann.true_structure, parse.structure);
  EvalReport r;
  r.matrix = confusion_matrix(pairs);
  r.per_class = per_class_metrics(r.matrix);
  r.macro = macro_metrics(r.per_class);
  r.grouping = grouping_accuracy(std::span<const std::pair<ScreenshotParse, Annotation>>(results), how);
  return r;
}

nlohmann::ordered_json report_to_json(const EvalReport& r) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["schema_version"] = 1;
  j["total"] = r.matrix.total();
  ordered_json classes = ordered_json::array();
  for (auto c : r.matrix.classes) classes.push_back(std::string(to_string(c)));
  j["confusion_matrix"] = {{"classes", classes}, {"counts", r.matrix.counts}};
  ordered_json per = ordered_json::object();
  for (const auto& [c, m] : r.per_class) {
    per[std::string(to_string(c))] = {
        {"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}, {"support", m.support}};
  }
  j["per_class"] = per;
  j["macro"] = {{"precision", r.macro.precision},
                {"recall", r.macro.recall},
                {"macro_f1", r.macro.f1},
                {"mean_f1", r.macro.mean_f1}};
  j["grouping_accuracy"] = r.grouping.overall;
  j["grouping_correct"] = r.grouping.correct;
  ordered_json pcg = ordered_json::object();
  for (const auto& [c, v] : r.grouping.per_class) pcg[std::string(to_string(c))] = v;
  j["per_class_grouping"] = pcg;
  return j;
}

void validate_report_json(const nlohmann::ordered_json& j) {
  auto fail = [](const std::string& field, const std::string& why) {
    throw Error(ErrorCode::SchemaViolation, field + ": " + why, std::nullopt, field);
  };
  auto unit_interval = [&](const nlohmann::ordered_json& v, const std::string& field) {
    if (!v.is_number()) fail(field, "not a number");
    double d = v.get<double>();
    if (!(d >= 0.0 && d <= 1.0)) fail(field, "outside [0,1]");
  };
  if (!j.is_object()) fail("<root>", "not an object");
  for (const char* key : {"schema_version", "total", "confusion_matrix", "per_class", "macro",
                          "grouping_accuracy", "per_class_grouping"}) {
    if (!j.contains(key)) fail(key, "missing");
  }
  const auto& cm = j["confusion_matrix"];
  if (!cm.contains("classes") || !cm["classes"].is_array()) fail("confusion_matrix.classes", "missing");
  if (!cm.contains("counts") || !cm["counts"].is_array()) fail("confusion_matrix.counts", "missing");
  std::size_t n = cm["classes"].size();
  std::size_t total = 0;
  if (cm["counts"].size() != n) fail("confusion_matrix.counts", "row count differs from classes");
  for (const auto& row : cm["counts"]) {
    if (!row.is_array() || row.size() != n) fail("confusion_matrix.counts", "not square");
    for (const auto& c : row) {
      if (!c.is_number_unsigned()) fail("confusion_matrix.counts", "negative or non-integer");
      total += c.get<std::size_t>();
    }
  }
  if (j["total"].get<std::size_t>() != total) fail("total", "differs from matrix sum");
  std::size_t support = 0;
  for (const auto& [name, m] : j["per_class"].items()) {
    if (!parse_structure(name)) fail("per_class", "unknown class " + name);
    for (const char* key : {"precision", "recall", "f1"}) {
      if (!m.contains(key)) fail("per_class." + name + "." + key, "missing");
      unit_interval(m[key], "per_class." + name + "." + key);
    }
    support += m.value("support", std::size_t{0});
  }
  if (support != total) fail("per_class", "supports do not sum to total");
  for (const char* key : {"precision", "recall", "macro_f1", "mean_f1"}) {
    if (!j["macro"].contains(key)) fail(std::string("macro.") + key, "missing");
    unit_interval(j["macro"][key], std::string("macro.") + key);
  }
  unit_interval(j["grouping_accuracy"], "grouping_accuracy");
  for (const auto& [name, v] : j["per_class_grouping"].items()) {
    unit_interval(v, "per_class_grouping." + name);
  }
}

std::string confusion_csv(const ConfusionMatrix& m) {
  std::ostringstream out;
  out << "true\\predicted";
  for (auto c : m.classes) out << ',' << to_string(c);
  out << '\n';
  for (std::size_t i = 0; i < m.classes.size(); ++i) {
    out << to_string(m.classes[i]);
    for (auto v : m.counts[i]) out << ',' << v;
    out << '\n';
  }
  return out.str();
}

std::string format_metrics_table(const EvalReport& r) {
  std::ostringstream out;
  char buf[128];
  std::snprintf(buf, sizeof buf, "%-22s %9s %9s %9s\n", "Category", "Precision", "Recall", "F1");
  out << buf;
  auto row = [&](const std::string& label, double p, double rc, double f) {
    std::snprintf(buf, sizeof buf, "%-22s %9.2f %9.2f %9.2f\n", label.c_str(), round_half_up(p),
                  round_half_up(rc), round_half_up(f));
    out << buf;
  };
  for (const auto& [c, m] : r.per_class) {
    if (m.support == 0) continue;
    row(std::string(to_string(c)) + " (k=" + std::to_string(m.support) + ")", m.precision, m.recall,
        m.f1);
  }
  row("Overall (k=" + std::to_string(r.matrix.total()) + ")", r.macro.precision, r.macro.recall,
      r.macro.f1);
  std::snprintf(buf, sizeof buf, "mean of per-class F1: %.2f\n", round_half_up(r.macro.mean_f1));
  out << buf;
  std::snprintf(buf, sizeof buf, "grouping accuracy: %.4f (%zu/%zu)\n", r.grouping.overall,
                r.grouping.correct, r.grouping.total);
  out << buf;
  for (const auto& [c, v] : r.grouping.per_class) {
    std::snprintf(buf, sizeof buf, "  %-14s %.4f\n", std::string(to_string(c)).c_str(), v);
    out << buf;
  }
  return out.str();
}

}  // namespace postshot
