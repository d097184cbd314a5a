#pragma once

// Token-level finite-state automaton for the Grounder's output grammar:
//
//   "[]" | "[" M ("," M){0,max_mentions-1} "]"     M = ["<event>","<trigger>"]
//
// with every <event> drawn from the ontology and every <trigger> from the
// atomized document. Decision states follow the four-way structure of the
// grammar (event-or-empty, event type, trigger, continue-or-end); every
// literal segment is laid out along its canonical token path and alternative
// paths sharing a token prefix are merged into a trie, which keeps the
// automaton deterministic for subword vocabularies.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dicore/ontology.hpp"
#include "dicore/vocabulary.hpp"

namespace dicore {

using StateId = std::uint32_t;

enum class StateTag : std::uint8_t {
  kPreamble,       ///< start: event-free output or first mention
  kEventChoice,    ///< choose an ontology event type
  kTriggerChoice,  ///< choose an atomized trigger phrase
  kContinueOrEnd,  ///< a mention was just closed: another one, or close the list
  kInterior,       ///< inside a multi-token literal
  kAccept,         ///< the single accepting state; no outgoing transitions
};

std::string_view to_string(StateTag tag);
std::optional<StateTag> parse_state_tag(std::string_view name);

/// Set of token ids permitted at a state, sorted ascending. Non-owning view
/// into the automaton it came from.
struct LogitMask {
  std::span<const TokenId> allowed;

  bool empty() const { return allowed.empty(); }
  std::size_t size() const { return allowed.size(); }
  bool contains(TokenId id) const;
};

class TokenAutomaton {
 public:
  StateId start() const { return start_; }
  StateId accept() const { return accept_; }
  std::size_t num_states() const { return tags_.size(); }
  std::size_t num_transitions() const { return tokens_.size(); }
  int max_mentions() const { return max_mentions_; }
  const Vocabulary& vocabulary() const { return vocab_; }
  std::span<const std::string> candidates() const { return candidates_; }

  /// Throw UNKNOWN_STATE for ids outside [0, num_states()).
  StateTag tag(StateId state) const;
  bool is_accepting(StateId state) const { return state == accept_; }
  LogitMask allowed(StateId state) const;
  std::span<const StateId> successors(StateId state) const;
  std::optional<StateId> next(StateId state, TokenId token) const;

  /// Upper bound on tokens along any accepting path (the graph is acyclic).
  std::size_t longest_path() const { return longest_path_; }

 private:
  friend class AutomatonBuilder;
  explicit TokenAutomaton(Vocabulary vocab) : vocab_(std::move(vocab)) {}
  void check_state(StateId state) const;

  Vocabulary vocab_;
  StateId start_ = 0;
  StateId accept_ = 0;
  int max_mentions_ = 0;
  std::size_t longest_path_ = 0;
  std::vector<std::string> candidates_;
  std::vector<StateTag> tags_;
  // CSR layout: transitions of state s are [offsets_[s], offsets_[s + 1]),
  // sorted by token id.
  std::vector<std::uint32_t> offsets_;
  std::vector<TokenId> tokens_;
  std::vector<StateId> targets_;
};

inline constexpr int kDefaultMaxMentions = 20;

/// Compiles the output grammar for one document. An empty candidate set is
/// legal and yields an automaton accepting only "[]". Throws
/// VOCAB_CANNOT_ENCODE when a name, candidate or literal cannot be encoded,
/// INVALID_ARGUMENT when max_mentions < 1.
TokenAutomaton build_grounder_fsm(const EventOntology& ontology, const Document& doc,
                                  const AtomizationPolicy& policy, const Vocabulary& vocab,
                                  int max_mentions = kDefaultMaxMentions);

/// Same, from an explicit candidate list (already deduplicated).
TokenAutomaton build_grounder_fsm(const EventOntology& ontology,
                                  std::span<const std::string> candidates,
                                  const Vocabulary& vocab,
                                  int max_mentions = kDefaultMaxMentions);

LogitMask allowed_tokens(const TokenAutomaton& automaton, StateId state);

/// Single-owner cursor over an automaton.
class DecodeSession {
 public:
  explicit DecodeSession(const TokenAutomaton& automaton);

  StateId state() const { return state_; }
  StateTag tag() const { return automaton_->tag(state_); }
  bool finished() const { return automaton_->is_accepting(state_); }
  int mention_count() const { return mention_count_; }
  std::span<const TokenId> emitted() const { return emitted_; }
  LogitMask mask() const { return automaton_->allowed(state_); }
  const TokenAutomaton& automaton() const { return *automaton_; }

  /// Advances by one token. Throws ILLEGAL_TRANSITION, leaving the session
  /// unchanged, when the token is not allowed at the current state.
  void step(TokenId token);

 private:
  const TokenAutomaton* automaton_;
  StateId state_;
  std::vector<TokenId> emitted_;
  int mention_count_ = 0;
};

/// Token sequences of all accepting paths with at most `max_tokens` tokens.
/// Throws BUDGET_EXCEEDED when more than `node_cap` search nodes are expanded.
std::vector<std::vector<TokenId>> enumerate_paths(const TokenAutomaton& automaton,
                                                  std::size_t max_tokens,
                                                  std::size_t node_cap = 2'000'000);

/// Decoded strings of enumerate_paths(), deduplicated.
std::set<std::string> enumerate_language(const TokenAutomaton& automaton,
                                         std::size_t max_tokens,
                                         std::size_t node_cap = 2'000'000);

struct AutomatonStats {
  std::size_t states = 0;
  std::size_t transitions = 0;
  std::size_t per_tag[6] = {};
};

AutomatonStats stats(const TokenAutomaton& automaton);

/// Line-oriented listing: one "state <id> <TAG>" line per state followed by
/// indented "  <token-id> <token-json> -> <target>" lines.
void dump(const TokenAutomaton& automaton, std::ostream& out);

}  // namespace dicore
