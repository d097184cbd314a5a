#pragma once

// JSON Lines I/O for gold datasets and prediction files.
//
//   dataset:     {"id", "text", "mentions"?: [{"event_type", "trigger"}], "tokens"?: [...]}
//   predictions: {"id", "mentions": [{"event_type", "trigger"}], "trace"?: {...}}

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dicore/eval.hpp"
#include "dicore/ontology.hpp"

namespace dicore {

struct Dataset {
  std::vector<GoldInstance> instances;
  /// Optional pre-tokenization per instance (same order).
  std::vector<std::optional<std::vector<std::string>>> tokens;
  /// One entry per skipped line or flagged instance, prefixed "line N: ".
  std::vector<std::string> diagnostics;

  /// Documents for inference. Throws INVALID_DOCUMENT.
  std::vector<Document> documents() const;
};

/// Malformed lines are skipped and reported; only unreadable input is fatal.
Dataset load_dataset(std::istream& source);
/// Throws IO_FAILURE when the file cannot be opened.
Dataset load_dataset_file(const std::filesystem::path& path);

struct PredictionSet {
  std::vector<Prediction> predictions;
  std::vector<std::string> diagnostics;
};

PredictionSet load_predictions(std::istream& source);
PredictionSet load_predictions_file(const std::filesystem::path& path);

/// One JSON line without the trailing newline. `trace_json`, when given, must
/// be a serialized JSON object and is embedded under "trace".
std::string prediction_to_jsonl(const Prediction& prediction,
                                std::optional<std::string_view> trace_json = std::nullopt);

/// Writes `contents` to a sibling temporary file and renames it over `path`.
/// Throws IO_FAILURE.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace dicore
