#pragma once

// Corpus-level TI / TC / EI scoring with set semantics per document.
//
//   TI  key = case-folded trigger
//   TC  key = (event type, case-folded trigger)
//   EI  key = event type
//
// Within a document predicted and gold items are reduced to sets of keys;
// tp = |pred ∩ gold|, fp = |pred \ gold|, fn = |gold \ pred|, summed over the
// corpus. Precision and recall are 0 when undefined.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dicore/ontology.hpp"

namespace dicore {

enum class Metric { kTI, kTC, kEI };

std::string_view to_string(Metric metric);

struct Scores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;

  static Scores from_counts(std::int64_t tp, std::int64_t fp, std::int64_t fn);
};

struct GoldInstance {
  std::string id;
  std::string text;
  std::vector<GroundedMention> mentions;
  bool unlabeled = false;
  /// Gold triggers that are not substrings of the text (kept, but flagged).
  std::vector<std::string> flags;
};

struct Prediction {
  std::string id;
  std::vector<GroundedMention> mentions;
};

/// Throws ID_MISMATCH when a prediction id has no gold instance or ids repeat.
/// Gold documents without a prediction count as empty predictions.
Scores score(std::span<const Prediction> preds, std::span<const GoldInstance> golds,
             Metric metric);

struct MetricScores {
  Scores ti;
  Scores tc;
  Scores ei;

  const Scores& get(Metric metric) const;
  Scores& get(Metric metric);
};

MetricScores score_all(std::span<const Prediction> preds, std::span<const GoldInstance> golds);

/// Per-dataset scores plus their unweighted macro-average. In reports built
/// by aggregate_runs, precision/recall/F1 are means over runs and the counts
/// are totals over runs.
struct EvalReport {
  std::map<std::string, MetricScores> datasets;
  MetricScores average;
  int runs = 1;
};

/// Builds a single-run report and fills in the macro-average.
EvalReport make_report(std::map<std::string, MetricScores> datasets);

/// Mean over runs of per-dataset precision/recall/F1; the average is then the
/// macro-average across datasets. Throws SHAPE_MISMATCH when the reports do not
/// cover the same datasets, INVALID_ARGUMENT for an empty list.
EvalReport aggregate_runs(std::span<const EvalReport> reports);

struct CharSpan {
  std::size_t begin = 0;
  std::size_t end = 0;  // exclusive

  friend bool operator==(const CharSpan&, const CharSpan&) = default;
};

/// First case-insensitive occurrence of `trigger` in `text`, preferring
/// occurrences with word boundaries on both sides. std::nullopt when absent.
std::optional<CharSpan> map_to_span(std::string_view trigger, std::string_view text);

/// JSON rendering of a report: {"runs", "datasets": {name: {TI|TC|EI: {...}}}, "average": {...}}.
std::string report_to_json(const EvalReport& report);

/// Fixed-width table: one row per dataset plus "Average", with P/R/F1 columns
/// for TI, TC and EI in percent.
void write_report_table(const EvalReport& report, std::ostream& out);

}  // namespace dicore
