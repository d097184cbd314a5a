#pragma once

// Independent reference implementations used by unit and acceptance tests.
// Nothing here calls into the library code it is used to check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace oracle {

inline std::filesystem::path data_dir() { return DICORE_TEST_DATA_DIR; }

using Pair = std::pair<std::string, std::string>;

/// Canonical surface form produced by a stock JSON serializer.
inline std::string canonical(const std::vector<Pair>& pairs) {
  auto arr = nlohmann::json::array();
  for (const auto& [e, t] : pairs) arr.push_back({e, t});
  return arr.dump();
}

/// Every valid output for the grammar: "[]" plus all pair sequences of length 1..max.
inline std::set<std::string> brute_force_language(const std::vector<std::string>& events,
                                                  const std::vector<std::string>& candidates,
                                                  int max_mentions) {
  std::set<std::string> out{"[]"};
  std::vector<Pair> alphabet;
  for (const auto& e : events) {
    for (const auto& c : candidates) alphabet.emplace_back(e, c);
  }
  if (alphabet.empty()) return out;
  std::vector<std::vector<Pair>> layer{{}};
  for (int k = 1; k <= max_mentions; ++k) {
    std::vector<std::vector<Pair>> next;
    for (const auto& prefix : layer) {
      for (const auto& p : alphabet) {
        auto seq = prefix;
        seq.push_back(p);
        out.insert(canonical(seq));
        next.push_back(std::move(seq));
      }
    }
    layer = std::move(next);
  }
  return out;
}

/// Reference parse of a canonical output; std::nullopt when malformed or not
/// byte-identical to its own re-serialization.
inline std::optional<std::vector<Pair>> parse_canonical(const std::string& text) {
  const auto j = nlohmann::json::parse(text, nullptr, false);
  if (!j.is_array()) return std::nullopt;
  std::vector<Pair> pairs;
  for (const auto& p : j) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_string() || !p[1].is_string()) {
      return std::nullopt;
    }
    pairs.emplace_back(p[0].get<std::string>(), p[1].get<std::string>());
  }
  if (canonical(pairs) != text) return std::nullopt;
  return pairs;
}

/// Longest-match-first tokenizer over an explicit token list.
class GreedyTokenizer {
 public:
  explicit GreedyTokenizer(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
    for (std::size_t i = 0; i < tokens_.size(); ++i) {
      index_[tokens_[i]] = static_cast<std::int32_t>(i);
      max_len_ = std::max(max_len_, tokens_[i].size());
    }
  }

  std::optional<std::vector<std::int32_t>> encode(const std::string& s) const {
    std::vector<std::int32_t> out;
    std::size_t pos = 0;
    while (pos < s.size()) {
      bool found = false;
      for (std::size_t len = std::min(max_len_, s.size() - pos); len > 0; --len) {
        auto it = index_.find(s.substr(pos, len));
        if (it != index_.end()) {
          out.push_back(it->second);
          pos += len;
          found = true;
          break;
        }
      }
      if (!found) return std::nullopt;
    }
    return out;
  }

  std::string decode(const std::vector<std::int32_t>& ids) const {
    std::string s;
    for (auto id : ids) s += tokens_[static_cast<std::size_t>(id)];
    return s;
  }

  const std::vector<std::string>& tokens() const { return tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::map<std::string, std::int32_t> index_;
  std::size_t max_len_ = 0;
};

/// Segments of a canonical output in the order the grammar emits them.
inline std::vector<std::string> segments(const std::vector<Pair>& pairs) {
  if (pairs.empty()) return {"[]"};
  const auto esc = [](const std::string& s) {
    const std::string q = nlohmann::json(s).dump();
    return q.substr(1, q.size() - 2);
  };
  std::vector<std::string> segs{"[[\""};
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (i > 0) segs.push_back(",[\"");
    segs.push_back(esc(pairs[i].first));
    segs.push_back("\",\"");
    segs.push_back(esc(pairs[i].second));
    segs.push_back("\"]");
  }
  segs.push_back("]");
  return segs;
}

/// Segment-by-segment encoding where each segment sees the whole text emitted
/// so far: encode(context + segment) minus encode(context) when that is a
/// prefix, encode(segment) otherwise.
inline std::optional<std::vector<std::int32_t>> accumulated_encoding(
    const GreedyTokenizer& tok, const std::vector<std::string>& segs) {
  std::vector<std::int32_t> path;
  std::string context;
  for (const auto& seg : segs) {
    const auto ctx = tok.encode(context);
    const auto full = tok.encode(context + seg);
    if (!ctx || !full) return std::nullopt;
    if (full->size() >= ctx->size() && std::equal(ctx->begin(), ctx->end(), full->begin())) {
      path.insert(path.end(), full->begin() + static_cast<std::ptrdiff_t>(ctx->size()), full->end());
    } else {
      const auto alone = tok.encode(seg);
      if (!alone) return std::nullopt;
      path.insert(path.end(), alone->begin(), alone->end());
    }
    context += seg;
  }
  return path;
}

/// Plain softmax over the full vector, computed in long double.
inline std::vector<long double> softmax(const std::vector<double>& logits) {
  long double m = -INFINITY;
  for (double l : logits) m = std::max<long double>(m, l);
  std::vector<long double> p(logits.size());
  long double z = 0;
  for (std::size_t i = 0; i < logits.size(); ++i) z += p[i] = std::exp(logits[i] - m);
  for (auto& v : p) v /= z;
  return p;
}

struct Counts {
  std::int64_t tp = 0, fp = 0, fn = 0;
};

enum class Key { kTrigger, kPair, kType };

inline std::string lower(std::string s) {
  for (auto& c : s) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return s;
}

/// Pairwise matching after collapsing duplicate keys, per document.
inline Counts brute_force_counts(const std::vector<std::vector<Pair>>& preds,
                                 const std::vector<std::vector<Pair>>& golds, Key key) {
  const auto keyed = [&](const std::vector<Pair>& items) {
    std::vector<std::string> out;
    for (const auto& [e, t] : items) {
      std::string k = key == Key::kTrigger ? lower(t)
                      : key == Key::kType  ? e
                                           : e + '\x1f' + lower(t);
      bool seen = false;
      for (const auto& o : out) seen = seen || o == k;
      if (!seen) out.push_back(k);
    }
    return out;
  };
  Counts c;
  for (std::size_t d = 0; d < golds.size(); ++d) {
    const auto p = keyed(preds[d]);
    const auto g = keyed(golds[d]);
    std::int64_t matched = 0;
    for (const auto& pk : p) {
      for (const auto& gk : g) {
        if (pk == gk) ++matched;
      }
    }
    c.tp += matched;
    c.fp += static_cast<std::int64_t>(p.size()) - matched;
    c.fn += static_cast<std::int64_t>(g.size()) - matched;
  }
  return c;
}

inline double f1_from(const Counts& c) {
  const double p = c.tp + c.fp ? double(c.tp) / double(c.tp + c.fp) : 0.0;
  const double r = c.tp + c.fn ? double(c.tp) / double(c.tp + c.fn) : 0.0;
  return p + r > 0 ? 2 * p * r / (p + r) : 0.0;
}

// Random instance generation.

inline const std::vector<std::string>& word_pool() {
  static const std::vector<std::string> pool = {
      "the",  "attack", "war",     "birth",   "arrested", "said",     "fired", "he",
      "she",  "in",     "on",      "at",      "Police",   "troops",   "quiet", "city,",
      "men.", "(url)",  "say\"hi", "back\\sl", "Covid-19", "they'll", "a",     "born",
      "died", "rest",   "testing", "spread!", "x",        "June",     "over",  "ran"};
  return pool;
}

inline std::string random_sentence(std::mt19937_64& rng, int min_words, int max_words) {
  std::uniform_int_distribution<int> n(min_words, max_words);
  std::uniform_int_distribution<std::size_t> w(0, word_pool().size() - 1);
  std::string s;
  const int count = n(rng);
  for (int i = 0; i < count; ++i) {
    if (i) s += ' ';
    s += word_pool()[w(rng)];
  }
  return s;
}

inline std::vector<std::string> random_event_names(std::mt19937_64& rng, int min_n, int max_n) {
  static const std::vector<std::string> names = {
      "Attack", "Life:Be-Born", "Life:Die", "Arrest-Jail", "Transport", "Meet", "Marry",
      "Demonstrate", "Change_event_time", "Dispersal", "prevent", "control", "A", "B",
      "Quote\"Type", "Slash\\Type"};
  std::uniform_int_distribution<int> n(min_n, max_n);
  auto shuffled = names;
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  shuffled.resize(static_cast<std::size_t>(n(rng)));
  return shuffled;
}

}  // namespace oracle
