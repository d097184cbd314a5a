#pragma once

// Dreamer -> Grounder -> Judge orchestration plus the direct (MD) and two-stage
// (MS) baseline prompt styles.

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dicore/backend.hpp"
#include "dicore/freeform_parser.hpp"
#include "dicore/ontology.hpp"
#include "dicore/prompts.hpp"
#include "dicore/sampling.hpp"
#include "dicore/vocabulary.hpp"

namespace dicore {

enum class PromptStyle { kDicore, kMd, kMs };

std::string_view to_string(PromptStyle style);
std::optional<PromptStyle> parse_prompt_style(std::string_view name);

struct PipelineConfig {
  double temperature = SamplingParams::kDefaultTemperature;
  double top_p = SamplingParams::kDefaultTopP;
  int runs = 3;
  bool judge_enabled = true;
  AtomizationPolicy atomization;
  int max_mentions = kDefaultMaxMentions;
  PromptStyle prompt_style = PromptStyle::kDicore;
  /// Grounder prompt lists names only instead of "name: definition" lines.
  bool ontology_names_only = false;
  int dreamer_max_tokens = 512;
  int judge_max_tokens = 4;

  /// Throws INVALID_CONFIG.
  void validate() const;
  SamplingParams sampling(int max_new_tokens, std::uint64_t seed) const;
};

struct JudgeVerdict {
  GroundedMention mention;
  bool accepted = false;
  std::string raw_reply;
  /// Reply was neither a Yes nor a No.
  bool flagged = false;
};

/// "yes" / "no" after trimming whitespace, quotes and markup; std::nullopt otherwise.
std::optional<bool> parse_judge_reply(std::string_view reply);

struct PipelineBackends {
  std::shared_ptr<Backend> chat;
  std::shared_ptr<Backend> logits;
};

/// Per-document record of every stage. For the baselines `dreamed` holds the
/// parsed free-form output and `grounded` the mentions that survived the
/// ontology/text filter.
struct StageTrace {
  std::vector<FreeFormMention> dreamed;
  std::vector<GroundedMention> grounded;
  std::vector<JudgeVerdict> verdicts;
  std::string grounder_output;
  std::vector<std::string> diagnostics;
};

struct DocumentResult {
  std::string id;
  std::vector<GroundedMention> mentions;
  StageTrace trace;
  /// Set when the document failed; mentions are then empty.
  std::optional<std::string> error;
};

/// Immutable once constructed; every method is safe to call concurrently.
class Pipeline {
 public:
  /// Throws INVALID_CONFIG for a bad config, CAPABILITY_MISMATCH when the
  /// backends cannot serve the configured style.
  Pipeline(EventOntology ontology, PipelineBackends backends, std::optional<Vocabulary> vocab,
           PipelineConfig config, PromptSet prompts = PromptSet::builtin());

  const PipelineConfig& config() const { return config_; }
  const EventOntology& ontology() const { return ontology_; }

  /// Unconstrained discovery. Unparseable replies yield an empty list and a
  /// diagnostic; triggers absent from the text are kept with trigger_in_text=false.
  std::vector<FreeFormMention> dreamer(const Document& doc, std::uint64_t seed,
                                       std::vector<std::string>* diagnostics = nullptr) const;

  /// FSM-constrained mapping of dreamed mentions onto the ontology.
  std::vector<GroundedMention> grounder(const Document& doc,
                                        std::span<const FreeFormMention> dreamed,
                                        std::uint64_t seed,
                                        std::string* raw_output = nullptr) const;

  JudgeVerdict judge(const GroundedMention& mention, const Document& doc,
                     std::uint64_t seed) const;

  /// Runs the configured style. Stage errors propagate.
  std::vector<GroundedMention> run_document(const Document& doc, std::uint64_t seed,
                                            StageTrace* trace = nullptr) const;

  /// run_document over many documents on up to `jobs` threads. Document i is
  /// seeded with document_seed(run_seed, id); failures are captured per document.
  std::vector<DocumentResult> run_batch(std::span<const Document> docs, std::uint64_t run_seed,
                                        int jobs = 1) const;

  std::string render_grounder_prompt(const Document& doc,
                                     std::span<const FreeFormMention> dreamed) const;

 private:
  std::vector<GroundedMention> run_dicore(const Document& doc, std::uint64_t seed,
                                          StageTrace& trace) const;
  std::vector<GroundedMention> run_md(const Document& doc, std::uint64_t seed,
                                      StageTrace& trace) const;
  std::vector<GroundedMention> run_ms(const Document& doc, std::uint64_t seed,
                                      StageTrace& trace) const;
  std::vector<GroundedMention> apply_judge(const Document& doc,
                                           std::span<const GroundedMention> mentions,
                                           std::uint64_t seed, StageTrace& trace) const;
  std::vector<GroundedMention> filter_freeform(const Document& doc,
                                               std::span<const FreeFormMention> raw,
                                               StageTrace& trace) const;
  std::string chat(std::string prompt, int max_tokens,
                   std::uint64_t seed) const;

  EventOntology ontology_;
  PipelineBackends backends_;
  std::optional<Vocabulary> vocab_;
  PipelineConfig config_;
  PromptSet prompts_;
  std::string ontology_block_;
  std::string ontology_names_block_;
};

std::uint64_t document_seed(std::uint64_t run_seed, std::string_view doc_id);

/// Orders mentions by the first occurrence of their trigger in `text`
/// (stable; triggers not found go last).
std::vector<GroundedMention> order_by_text(std::vector<GroundedMention> mentions,
                                           std::string_view text);

/// {"dreamer": [[name, trigger], ...], "grounder": [[type, trigger], ...],
///  "judge": [{"event_type", "trigger", "accepted", "reply", "flagged"?}], "diagnostics"?}
std::string trace_to_json(const StageTrace& trace);

}  // namespace dicore
