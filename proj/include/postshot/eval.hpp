#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "postshot/dates.hpp"
#include "postshot/grouping.hpp"
#include "postshot/structure.hpp"

namespace postshot {

struct AnnotatedUnit {
  std::string author;  // handle text; a leading '@' is tolerated
  std::optional<CalendarDate> date;
  std::string body;

  bool operator==(const AnnotatedUnit&) const = default;
};

struct Annotation {
  std::string screenshot_id;
  InternalStructure true_structure = InternalStructure::P1A1;
  std::vector<AnnotatedUnit> true_units;

  bool operator==(const Annotation&) const = default;
};

/// Rows are true classes, columns predicted classes.
struct ConfusionMatrix {
  std::vector<InternalStructure> classes;
  std::vector<std::vector<std::size_t>> counts;

  std::optional<std::size_t> index_of(InternalStructure s) const;
  std::size_t at(InternalStructure truth, InternalStructure predicted) const;
  std::size_t row_sum(InternalStructure truth) const;
  std::size_t column_sum(InternalStructure predicted) const;
  std::size_t total() const;
};

using StructurePair = std::pair<InternalStructure, InternalStructure>;  // (true, predicted)

// Classes are the observed ones, in canonical order.
ConfusionMatrix confusion_matrix(std::span<const StructurePair> pairs);

struct ClassMetrics {
  double precision = 0;
  double recall = 0;
  double f1 = 0;
  std::size_t support = 0;
};

using PerClassMetrics = std::map<InternalStructure, ClassMetrics>;

PerClassMetrics per_class_metrics(const ConfusionMatrix& m);

struct MacroMetrics {
  double precision = 0;
  double recall = 0;
  double f1 = 0;       // harmonic mean of macro precision and macro recall
  double mean_f1 = 0;  // unweighted mean of per-class f1, reported alongside
};

/// Averages over classes with nonzero support. Throws Error{NoSupportedClasses}.
MacroMetrics macro_metrics(const PerClassMetrics& per_class);

double round_half_up(double value, int decimals = 2);

enum class BodyMatchMode { Exact, Normalized, TokenJaccard };

struct BodyMatch {
  BodyMatchMode mode = BodyMatchMode::Normalized;
  double jaccard_threshold = 0.8;
};

bool bodies_match(std::string_view extracted, std::string_view annotated, const BodyMatch& how);

/// Every unit's author, day-precision date and body agree with the annotation,
/// in order. Throws Error{IdMismatch}.
bool grouping_correct(const ScreenshotParse& parse, const Annotation& ann, const BodyMatch& how = {});

struct GroupingAccuracy {
  double overall = 0;
  std::map<InternalStructure, double> per_class;  // keyed by true structure
  std::size_t correct = 0;
  std::size_t total = 0;
};

// Fraction form of `correct` out of `total`, split by class.
GroupingAccuracy grouping_accuracy(std::span<const std::pair<bool, InternalStructure>> verdicts);

/// Throws Error{EmptyInput}.
GroupingAccuracy grouping_accuracy(std::span<const std::pair<ScreenshotParse, Annotation>> results,
                                   const BodyMatch& how = {});

struct EvalReport {
  ConfusionMatrix matrix;
  PerClassMetrics per_class;
  MacroMetrics macro;
  GroupingAccuracy grouping;
};

/// Scores parses (whose `structure` is the prediction) against annotations.
/// Pairs are folded in screenshot_id order.
EvalReport evaluate(std::vector<std::pair<ScreenshotParse, Annotation>> results,
                    const BodyMatch& how = {});

nlohmann::ordered_json report_to_json(const EvalReport& r);

// Throws Error{SchemaViolation} naming the first offending field.
void validate_report_json(const nlohmann::ordered_json& j);

// Header row holds the predicted classes.
std::string confusion_csv(const ConfusionMatrix& m);

// Category / Precision / Recall / F1 table with an Overall row.
std::string format_metrics_table(const EvalReport& r);

}  // namespace postshot
