#pragma once

// Event ontology, input documents, trigger atomization and the task
// constraints every grounded mention must satisfy.

#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dicore/text.hpp"

namespace dicore {

struct EventType {
  std::string name;
  std::optional<std::string> definition;
};

/// Closed, ordered, non-empty set of event types with unique names.
class EventOntology {
 public:
  /// Throws MALFORMED_ONTOLOGY on an empty list, empty/multi-line names or duplicates.
  explicit EventOntology(std::vector<EventType> types);

  std::span<const EventType> types() const { return types_; }
  std::size_t size() const { return types_.size(); }
  bool contains(std::string_view name) const { return names_.contains(name); }

 private:
  std::vector<EventType> types_;
  std::set<std::string, std::less<>> names_;
};

/// Parses `[{"name": ..., "definition"?: ...}, ...]`, preserving order.
EventOntology load_ontology(std::istream& source);
EventOntology load_ontology_file(const std::filesystem::path& path);

class Document {
 public:
  /// `tokens`, when given, must reproduce the whitespace-split word sequence of
  /// `text`. Throws INVALID_DOCUMENT otherwise or when text is blank.
  Document(std::string id, std::string text,
           std::optional<std::vector<std::string>> tokens = std::nullopt);

  const std::string& id() const { return id_; }
  const std::string& text() const { return text_; }
  std::span<const std::string> words() const { return words_; }
  /// Byte spans of words() within text().
  std::span<const text::WordSpan> word_spans() const { return spans_; }

 private:
  std::string id_;
  std::string text_;
  std::vector<std::string> words_;
  std::vector<text::WordSpan> spans_;
};

enum class AtomizationMode { kSingleWord, kSubstring };

struct AtomizationPolicy {
  static constexpr int kDefaultMaxPhraseWords = 5;

  AtomizationMode mode = AtomizationMode::kSingleWord;
  int max_phrase_words = kDefaultMaxPhraseWords;

  static AtomizationPolicy single_word() { return {AtomizationMode::kSingleWord, 1}; }
  static AtomizationPolicy substring(int max_words = kDefaultMaxPhraseWords) {
    return {AtomizationMode::kSubstring, max_words};
  }

  /// Throws INVALID_POLICY when max_phrase_words < 1.
  void validate() const;
};

/// Policy used for a named benchmark dataset: single words for SPEED, ACE and
/// FewEvent; bounded substrings for CASIE, GENIA and MAVEN. Case-insensitive.
std::optional<AtomizationPolicy> policy_for_dataset(std::string_view dataset);

struct GroundedMention {
  std::string event_type;
  std::string trigger;

  friend bool operator==(const GroundedMention&, const GroundedMention&) = default;
  friend auto operator<=>(const GroundedMention&, const GroundedMention&) = default;
};

/// Candidate trigger phrases of `doc` under `policy`, deduplicated in order of
/// first occurrence. SINGLE_WORD: boundary-punctuation-stripped words.
/// SUBSTRING: word n-grams (n <= max_phrase_words) ordered by (start, length),
/// each an exact slice of the text with boundary punctuation stripped.
std::vector<std::string> atomize(const Document& doc, const AtomizationPolicy& policy);

enum class Violation { kEventNotInOntology, kTriggerNotInText };

std::string_view to_string(Violation v);

std::vector<Violation> validate_mention(const GroundedMention& mention,
                                        const EventOntology& ontology,
                                        const Document& doc,
                                        const AtomizationPolicy& policy);

/// Same check against a precomputed atomize() result.
std::vector<Violation> validate_mention(const GroundedMention& mention,
                                        const EventOntology& ontology,
                                        std::span<const std::string> candidates);

}  // namespace dicore
