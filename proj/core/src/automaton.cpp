#include "dicore/automaton.hpp"

#include <algorithm>
#include <ostream>

#include "dicore/error.hpp"
#include "dicore/text.hpp"

namespace dicore {

std::string_view to_string(StateTag tag) {
  switch (tag) {
    case StateTag::kPreamble: return "PREAMBLE";
    case StateTag::kEventChoice: return "EVENT_CHOICE";
    case StateTag::kTriggerChoice: return "TRIGGER_CHOICE";
    case StateTag::kContinueOrEnd: return "CONTINUE_OR_END";
    case StateTag::kInterior: return "INTERIOR";
    case StateTag::kAccept: return "ACCEPT";
  }
  return "UNKNOWN";
}

std::optional<StateTag> parse_state_tag(std::string_view name) {
  for (auto tag : {StateTag::kPreamble, StateTag::kEventChoice, StateTag::kTriggerChoice,
                   StateTag::kContinueOrEnd, StateTag::kInterior, StateTag::kAccept}) {
    if (to_string(tag) == name) return tag;
  }
  return std::nullopt;
}

bool LogitMask::contains(TokenId id) const {
  return std::binary_search(allowed.begin(), allowed.end(), id);
}

void TokenAutomaton::check_state(StateId state) const {
  if (state >= tags_.size()) {
    throw Error(ErrorCode::kUnknownState, "state " + std::to_string(state) + " does not exist");
  }
}

StateTag TokenAutomaton::tag(StateId state) const {
  check_state(state);
  return tags_[state];
}

LogitMask TokenAutomaton::allowed(StateId state) const {
  check_state(state);
  const auto begin = offsets_[state];
  const auto end = offsets_[state + 1];
  return LogitMask{std::span<const TokenId>(tokens_).subspan(begin, end - begin)};
}

std::span<const StateId> TokenAutomaton::successors(StateId state) const {
  check_state(state);
  const auto begin = offsets_[state];
  const auto end = offsets_[state + 1];
  return std::span<const StateId>(targets_).subspan(begin, end - begin);
}

std::optional<StateId> TokenAutomaton::next(StateId state, TokenId token) const {
  const auto mask = allowed(state);
  auto it = std::lower_bound(mask.allowed.begin(), mask.allowed.end(), token);
  if (it == mask.allowed.end() || *it != token) return std::nullopt;
  return targets_[offsets_[state] + static_cast<std::size_t>(it - mask.allowed.begin())];
}

class AutomatonBuilder {
 public:
  explicit AutomatonBuilder(const Vocabulary& vocab) : vocab_(vocab) {}

  StateId add_state(StateTag tag) {
    tags_.push_back(tag);
    edges_.emplace_back();
    return static_cast<StateId>(tags_.size() - 1);
  }

  // Inserts `path` below `from` as a trie branch ending in `target`. Interior
  // states are shared with earlier branches of the same decision.
  void add_path(StateId from, std::span<const TokenId> path, StateId target) {
    if (path.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "empty token path in grammar");
    }
    StateId cur = from;
    for (std::size_t i = 0; i < path.size(); ++i) {
      const bool last = i + 1 == path.size();
      auto& edges = edges_[cur];
      auto it = std::find_if(edges.begin(), edges.end(),
                             [&](const auto& e) { return e.first == path[i]; });
      if (it != edges.end()) {
        if (last || tags_[it->second] != StateTag::kInterior) {
          throw Error(ErrorCode::kInvalidArgument,
                      "ambiguous grammar: token path of \"" + vocab_.decode(path) +
                          "\" collides with another alternative");
        }
        cur = it->second;
        continue;
      }
      const StateId next = last ? target : add_state(StateTag::kInterior);
      edges_[cur].emplace_back(path[i], next);
      cur = next;
    }
  }

  TokenAutomaton finish(StateId start, StateId accept, int max_mentions,
                        std::vector<std::string> candidates) {
    TokenAutomaton a(vocab_);
    a.start_ = start;
    a.accept_ = accept;
    a.max_mentions_ = max_mentions;
    a.candidates_ = std::move(candidates);
    a.tags_ = std::move(tags_);
    a.offsets_.reserve(edges_.size() + 1);
    a.offsets_.push_back(0);
    for (auto& edges : edges_) {
      std::sort(edges.begin(), edges.end());
      for (const auto& [token, target] : edges) {
        a.tokens_.push_back(token);
        a.targets_.push_back(target);
      }
      a.offsets_.push_back(static_cast<std::uint32_t>(a.tokens_.size()));
    }
    a.longest_path_ = longest_path(a);
    return a;
  }

 private:
  // Longest start->accept path length by dynamic programming over a
  // topological order (Kahn); the grammar graph has no cycles.
  static std::size_t longest_path(const TokenAutomaton& a) {
    const std::size_t n = a.tags_.size();
    std::vector<std::uint32_t> indegree(n, 0);
    for (const StateId t : a.targets_) ++indegree[t];
    std::vector<StateId> order;
    order.reserve(n);
    for (StateId s = 0; s < n; ++s) {
      if (indegree[s] == 0) order.push_back(s);
    }
    for (std::size_t i = 0; i < order.size(); ++i) {
      for (const StateId t : a.successors(order[i])) {
        if (--indegree[t] == 0) order.push_back(t);
      }
    }
    if (order.size() != n) {
      throw Error(ErrorCode::kInvalidArgument, "grammar automaton contains a cycle");
    }
    std::vector<std::size_t> depth(n, 0);
    for (const StateId s : order) {
      for (const StateId t : a.successors(s)) depth[t] = std::max(depth[t], depth[s] + 1);
    }
    return depth[a.accept_];
  }

  Vocabulary vocab_;
  std::vector<StateTag> tags_;
  std::vector<std::vector<std::pair<TokenId, StateId>>> edges_;
};

namespace {

// Structural literals of the canonical surface form.
constexpr std::string_view kEmptyList = "[]";
constexpr std::string_view kOpenFirst = "[[\"";
constexpr std::string_view kEventToTrigger = "\",\"";
constexpr std::string_view kCloseMention = "\"]";
constexpr std::string_view kOpenNext = ",[\"";
constexpr std::string_view kCloseList = "]";

// Token path of consecutive segments following a fixed structural context;
// each segment is encoded against everything emitted before it.
std::vector<TokenId> segment_path(const Vocabulary& vocab, std::string_view base_context,
                                  std::initializer_list<std::string_view> segments) {
  std::vector<TokenId> context;
  if (!base_context.empty()) context = vocab.encode(base_context);
  const std::size_t base = context.size();
  for (const auto segment : segments) {
    const auto tokens = canonical_token_path(vocab, segment, context);
    context.insert(context.end(), tokens.begin(), tokens.end());
  }
  return {context.begin() + static_cast<std::ptrdiff_t>(base), context.end()};
}

}  // namespace

TokenAutomaton build_grounder_fsm(const EventOntology& ontology,
                                  std::span<const std::string> candidates,
                                  const Vocabulary& vocab, int max_mentions) {
  if (max_mentions < 1) {
    throw Error(ErrorCode::kInvalidArgument, "max_mentions must be >= 1");
  }
  AutomatonBuilder builder(vocab);
  const StateId start = builder.add_state(StateTag::kPreamble);
  const StateId accept = builder.add_state(StateTag::kAccept);
  builder.add_path(start, segment_path(vocab, "", {kEmptyList}), accept);

  std::vector<std::string> kept(candidates.begin(), candidates.end());
  if (candidates.empty()) return builder.finish(start, accept, max_mentions, std::move(kept));

  // Alternatives are encoded once; layer k > 1 differs from layer 1 only in
  // the structural context preceding the event name.
  std::vector<std::string> event_texts;
  for (const auto& type : ontology.types()) event_texts.push_back(text::json_escape(type.name));
  auto event_paths = [&](std::string_view context) {
    std::vector<std::vector<TokenId>> paths;
    for (const auto& name : event_texts) {
      paths.push_back(segment_path(vocab, context, {name, kEventToTrigger}));
    }
    return paths;
  };
  const auto first_events = event_paths(kOpenFirst);
  const auto later_events =
      max_mentions > 1 ? event_paths(std::string(kCloseMention) + std::string(kOpenNext))
                       : std::vector<std::vector<TokenId>>{};
  std::vector<std::vector<TokenId>> trigger_paths;
  for (const auto& candidate : candidates) {
    trigger_paths.push_back(
        segment_path(vocab, kEventToTrigger, {text::json_escape(candidate), kCloseMention}));
  }
  const auto close_path = segment_path(vocab, kCloseMention, {kCloseList});
  const auto next_path = segment_path(vocab, kCloseMention, {kOpenNext});

  StateId event_state = builder.add_state(StateTag::kEventChoice);
  builder.add_path(start, segment_path(vocab, "", {kOpenFirst}), event_state);
  for (int layer = 1; layer <= max_mentions; ++layer) {
    const StateId trigger_state = builder.add_state(StateTag::kTriggerChoice);
    for (const auto& path : layer == 1 ? first_events : later_events) {
      builder.add_path(event_state, path, trigger_state);
    }
    const StateId continue_state = builder.add_state(StateTag::kContinueOrEnd);
    for (const auto& path : trigger_paths) builder.add_path(trigger_state, path, continue_state);
    builder.add_path(continue_state, close_path, accept);
    if (layer < max_mentions) {
      event_state = builder.add_state(StateTag::kEventChoice);
      builder.add_path(continue_state, next_path, event_state);
    }
  }
  return builder.finish(start, accept, max_mentions, std::move(kept));
}

TokenAutomaton build_grounder_fsm(const EventOntology& ontology, const Document& doc,
                                  const AtomizationPolicy& policy, const Vocabulary& vocab,
                                  int max_mentions) {
  const auto candidates = atomize(doc, policy);
  return build_grounder_fsm(ontology, candidates, vocab, max_mentions);
}

LogitMask allowed_tokens(const TokenAutomaton& automaton, StateId state) {
  return automaton.allowed(state);
}

DecodeSession::DecodeSession(const TokenAutomaton& automaton)
    : automaton_(&automaton), state_(automaton.start()) {}

void DecodeSession::step(TokenId token) {
  const auto next = automaton_->next(state_, token);
  if (!next) {
    throw Error(ErrorCode::kIllegalTransition,
                "token " + std::to_string(token) + " not allowed at state " +
                    std::to_string(state_) + " (" + std::string(to_string(tag())) + ")");
  }
  emitted_.push_back(token);
  state_ = *next;
  if (automaton_->tag(state_) == StateTag::kContinueOrEnd) ++mention_count_;
}

std::vector<std::vector<TokenId>> enumerate_paths(const TokenAutomaton& automaton,
                                                  std::size_t max_tokens,
                                                  std::size_t node_cap) {
  struct Frame {
    StateId state;
    std::size_t edge;
  };
  std::vector<std::vector<TokenId>> out;
  std::vector<Frame> stack{{automaton.start(), 0}};
  std::vector<TokenId> path;
  std::size_t expanded = 1;
  while (!stack.empty()) {
    Frame& top = stack.back();
    if (top.edge == 0 && automaton.is_accepting(top.state)) out.push_back(path);
    const auto mask = automaton.allowed(top.state);
    if (top.edge >= mask.size() || path.size() >= max_tokens) {
      stack.pop_back();
      if (!path.empty()) path.pop_back();
      continue;
    }
    const std::size_t i = top.edge++;
    if (++expanded > node_cap) {
      throw Error(ErrorCode::kBudgetExceeded,
                  "enumeration exceeded " + std::to_string(node_cap) + " nodes");
    }
    path.push_back(mask.allowed[i]);
    stack.push_back({automaton.successors(top.state)[i], 0});
  }
  return out;
}

std::set<std::string> enumerate_language(const TokenAutomaton& automaton,
                                         std::size_t max_tokens, std::size_t node_cap) {
  std::set<std::string> language;
  for (const auto& path : enumerate_paths(automaton, max_tokens, node_cap)) {
    language.insert(automaton.vocabulary().decode(path));
  }
  return language;
}

AutomatonStats stats(const TokenAutomaton& automaton) {
  AutomatonStats s;
  s.states = automaton.num_states();
  s.transitions = automaton.num_transitions();
  for (StateId id = 0; id < s.states; ++id) {
    ++s.per_tag[static_cast<std::size_t>(automaton.tag(id))];
  }
  return s;
}

void dump(const TokenAutomaton& automaton, std::ostream& out) {
  const auto& vocab = automaton.vocabulary();
  for (StateId s = 0; s < automaton.num_states(); ++s) {
    out << "state " << s << ' ' << to_string(automaton.tag(s));
    if (s == automaton.start()) out << " start";
    out << '\n';
    const auto mask = automaton.allowed(s);
    const auto targets = automaton.successors(s);
    for (std::size_t i = 0; i < mask.size(); ++i) {
      out << "  " << mask.allowed[i] << " \"" << text::json_escape(vocab.token_text(mask.allowed[i]))
          << "\" -> " << targets[i] << '\n';
    }
  }
}

}  // namespace dicore
