#pragma once

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dicore/backend.hpp"
#include "dicore/vocabulary.hpp"

namespace dicore {

/// Reply `reply` to any chat request whose joined content contains every
/// string in `match`.
struct ChatRule {
  std::vector<std::string> match;
  std::string reply;
};

/// Logit shaping for decoding positions whose prompt contains every `match`
/// string and, when set, whose automaton state carries `at_state`.
///  - `favor`: tokens with exactly these texts get a fixed bonus.
///  - `target`: tokens that keep the emitted text a prefix of `target` get a
///    bonus growing with their length, which walks the decoder along the
///    target string.
/// Unmatched positions fall back to `default_reply` as the target, or to flat
/// scores when there is none.
struct LogitRule {
  std::optional<StateTag> at_state;
  std::vector<std::string> match;
  std::vector<std::string> favor;
  std::optional<std::string> target;
};

struct ScriptedSpec {
  std::vector<ChatRule> chat;
  std::optional<std::string> default_reply;
  std::vector<LogitRule> logits;
  std::optional<Capabilities> capabilities;

  /// Reads the fixture file format:
  /// {"chat": [{"match": str|[str], "reply": str}], "default_reply"?: str,
  ///  "logits": [{"at_state"?: TAG, "match"?: str|[str], "favor"?: [str], "target"?: str}],
  ///  "capabilities"?: {"chat": bool, "logits": bool}}
  static ScriptedSpec from_json(std::istream& in);
  static ScriptedSpec from_json_text(const std::string& text);
  static ScriptedSpec from_file(const std::filesystem::path& path);
};

inline constexpr double kFavorBonus = 20.0;
inline constexpr double kTargetBonusPerByte = 8.0;

/// Deterministic backend driven by a fixture table. Overlapping patterns (one
/// rule's match set implied by another's under the same state key) are
/// rejected with SPEC_CONFLICT at construction; a request matched by more than
/// one rule at call time raises SPEC_CONFLICT as well. A request matched by no
/// chat rule and no default reply raises BACKEND_FAILURE.
///
/// `vocab` is required for logit access.
std::shared_ptr<Backend> make_scripted_backend(ScriptedSpec spec,
                                               std::optional<Vocabulary> vocab = std::nullopt);

}  // namespace dicore
