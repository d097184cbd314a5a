#include "dicore/ontology.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <unordered_set>

#include <json.hpp>

#include "dicore/error.hpp"

namespace dicore {

using nlohmann::json;

EventOntology::EventOntology(std::vector<EventType> types) : types_(std::move(types)) {
  if (types_.empty()) {
    throw Error(ErrorCode::kMalformedOntology, "ontology must contain at least one event type");
  }
  for (const auto& type : types_) {
    if (type.name.empty()) {
      throw Error(ErrorCode::kMalformedOntology, "event type name is empty");
    }
    if (type.name.find_first_of("\r\n") != std::string::npos) {
      throw Error(ErrorCode::kMalformedOntology,
                  "event type name contains a newline: " + type.name);
    }
    if (!names_.insert(type.name).second) {
      throw Error(ErrorCode::kMalformedOntology, "duplicate event type: " + type.name);
    }
  }
}

EventOntology load_ontology(std::istream& source) {
  json root;
  try {
    root = json::parse(source);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedOntology, std::string("invalid JSON: ") + e.what());
  }
  if (!root.is_array()) {
    throw Error(ErrorCode::kMalformedOntology, "ontology must be a JSON array");
  }
  std::vector<EventType> types;
  types.reserve(root.size());
  for (const auto& entry : root) {
    if (!entry.is_object() || !entry.contains("name") || !entry["name"].is_string()) {
      throw Error(ErrorCode::kMalformedOntology, "each entry needs a string \"name\"");
    }
    EventType type{entry["name"].get<std::string>(), std::nullopt};
    if (auto it = entry.find("definition"); it != entry.end() && !it->is_null()) {
      if (!it->is_string()) {
        throw Error(ErrorCode::kMalformedOntology, "\"definition\" must be a string");
      }
      type.definition = it->get<std::string>();
    }
    types.push_back(std::move(type));
  }
  return EventOntology(std::move(types));
}

EventOntology load_ontology_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot open ontology file " + path.string());
  return load_ontology(in);
}

Document::Document(std::string id, std::string text,
                   std::optional<std::vector<std::string>> tokens)
    : id_(std::move(id)), text_(std::move(text)) {
  spans_ = text::split_whitespace_spans(text_);
  if (spans_.empty()) {
    throw Error(ErrorCode::kInvalidDocument, "document '" + id_ + "' has blank text");
  }
  for (const auto& span : spans_) {
    words_.emplace_back(text_.substr(span.begin, span.end - span.begin));
  }
  if (tokens) {
    std::string joined;
    for (const auto& token : *tokens) {
      if (!joined.empty()) joined += ' ';
      joined += token;
    }
    if (text::split_whitespace(joined) != words_) {
      throw Error(ErrorCode::kInvalidDocument,
                  "tokens of document '" + id_ + "' do not reproduce its text");
    }
  }
}

void AtomizationPolicy::validate() const {
  if (max_phrase_words < 1) {
    throw Error(ErrorCode::kInvalidPolicy, "max_phrase_words must be >= 1");
  }
}

std::optional<AtomizationPolicy> policy_for_dataset(std::string_view dataset) {
  const std::string key = text::fold_case(dataset);
  if (key == "speed" || key == "ace" || key == "fewevent") {
    return AtomizationPolicy::single_word();
  }
  if (key == "casie" || key == "genia" || key == "maven") {
    return AtomizationPolicy::substring();
  }
  return std::nullopt;
}

std::vector<std::string> atomize(const Document& doc, const AtomizationPolicy& policy) {
  policy.validate();
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  auto add = [&](std::string_view phrase) {
    if (phrase.empty()) return;
    std::string s(phrase);
    if (seen.insert(s).second) out.push_back(std::move(s));
  };

  const std::string_view text = doc.text();
  const auto spans = doc.word_spans();
  if (policy.mode == AtomizationMode::kSingleWord) {
    for (const auto& span : spans) {
      add(text::strip_boundary_punct(text.substr(span.begin, span.end - span.begin)));
    }
    return out;
  }

  const auto max_len = static_cast<std::size_t>(policy.max_phrase_words);
  for (std::size_t start = 0; start < spans.size(); ++start) {
    for (std::size_t len = 1; len <= max_len && start + len <= spans.size(); ++len) {
      const auto begin = spans[start].begin;
      const auto end = spans[start + len - 1].end;
      add(text::strip_boundary_punct(text.substr(begin, end - begin)));
    }
  }
  return out;
}

std::string_view to_string(Violation v) {
  switch (v) {
    case Violation::kEventNotInOntology: return "EVENT_NOT_IN_ONTOLOGY";
    case Violation::kTriggerNotInText: return "TRIGGER_NOT_IN_TEXT";
  }
  return "UNKNOWN";
}

std::vector<Violation> validate_mention(const GroundedMention& mention,
                                        const EventOntology& ontology,
                                        std::span<const std::string> candidates) {
  std::vector<Violation> violations;
  if (!ontology.contains(mention.event_type)) {
    violations.push_back(Violation::kEventNotInOntology);
  }
  if (std::find(candidates.begin(), candidates.end(), mention.trigger) == candidates.end()) {
    violations.push_back(Violation::kTriggerNotInText);
  }
  return violations;
}

std::vector<Violation> validate_mention(const GroundedMention& mention,
                                        const EventOntology& ontology,
                                        const Document& doc,
                                        const AtomizationPolicy& policy) {
  const auto candidates = atomize(doc, policy);
  return validate_mention(mention, ontology, candidates);
}

}  // namespace dicore
