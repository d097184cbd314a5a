#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace dicore {

/// Dreamer-stage mention: a free-form event name and a trigger that may or may
/// not occur in the text.
struct FreeFormMention {
  std::string event_name;
  std::string trigger;
  /// False when the trigger is not a case-insensitive substring of the document.
  bool trigger_in_text = true;

  friend bool operator==(const FreeFormMention& a, const FreeFormMention& b) {
    return a.event_name == b.event_name && a.trigger == b.trigger;
  }
};

/// Lenient recovery of a list of (event, trigger) pairs from model output.
/// Accepts the first well-formed JSON array whose elements are pairs or
/// objects, after removing code fences, rewriting tuple parentheses to
/// brackets and single-quoted strings to double-quoted ones. Object elements
/// may use "event_type"/"event"/"type"/"event_name" and "trigger"/"trigger_word".
/// Elements with missing or blank fields are dropped; exact duplicates removed.
/// Throws PARSE_FAILURE when no such array exists.
std::vector<FreeFormMention> parse_freeform_json(std::string_view text);

/// First JSON array of strings in `text` (same leniency). Throws PARSE_FAILURE.
std::vector<std::string> parse_string_list(std::string_view text);

/// Text with fences stripped, tuples rewritten and single quotes normalized.
std::string normalize_freeform(std::string_view text);

}  // namespace dicore
