#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "backend_config.hpp"
#include "dicore/pipeline.hpp"

namespace dicore::cli {

inline constexpr const char* kToolVersion = "0.1.0";

struct RunOptions {
  std::string dataset;
  std::string ontology;
  std::string style = "dicore";
  std::string policy;  ///< empty: chosen from the dataset file name, else single-word
  int max_phrase_words = AtomizationPolicy::kDefaultMaxPhraseWords;
  std::string judge = "on";
  int runs = 3;
  double temperature = SamplingParams::kDefaultTemperature;
  double top_p = SamplingParams::kDefaultTopP;
  int max_mentions = kDefaultMaxMentions;
  std::string backend_config;
  std::string prompts_dir;
  bool ontology_names_only = false;
  int jobs = 1;
  std::uint64_t seed = 0;
  std::string out = "out";
  bool verbose_trace = false;
};

struct EvalOptions {
  std::vector<std::string> gold;  ///< "path" or "name=path"
  std::vector<std::string> pred;  ///< "path" or "name=path"; one per run
  std::string out;                ///< report JSON path; empty prints only the table
};

struct FsmOptions {
  std::string sentence;
  std::string ontology;
  std::string vocab;
  std::string encoder;
  std::string policy = "single-word";
  int max_phrase_words = AtomizationPolicy::kDefaultMaxPhraseWords;
  int max_mentions = kDefaultMaxMentions;
  int enumerate = 0;
  bool dump = false;
};

/// Builds the pipeline configuration from flags. Throws INVALID_CONFIG.
PipelineConfig pipeline_config(const RunOptions& options);

/// Manifest fields that determine outputs. `backends` may be empty.
nlohmann::json manifest_json(const PipelineConfig& config, const RunOptions& options,
                             const std::vector<BackendDescriptor>& backends,
                             const std::string& prompts_version);

int cmd_run(const RunOptions& options, std::ostream& out, std::ostream& err);
int cmd_eval(const EvalOptions& options, std::ostream& out, std::ostream& err);
int cmd_fsm(const FsmOptions& options, std::ostream& out, std::ostream& err);

/// Parses argv and dispatches. Library errors print "error[CODE]: message" on
/// one line and return a non-zero status.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dicore::cli
