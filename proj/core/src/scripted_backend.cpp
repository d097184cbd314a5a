#include "dicore/scripted_backend.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dicore/error.hpp"

namespace dicore {
namespace {

using nlohmann::json;

bool matches(const std::vector<std::string>& terms, std::string_view content) {
  return std::all_of(terms.begin(), terms.end(), [&](const std::string& t) {
    return content.find(t) != std::string_view::npos;
  });
}

// True when every text containing all of `specific` necessarily contains all
// of `general`.
bool implies(const std::vector<std::string>& general, const std::vector<std::string>& specific) {
  return std::all_of(general.begin(), general.end(), [&](const std::string& g) {
    return std::any_of(specific.begin(), specific.end(),
                       [&](const std::string& s) { return s.find(g) != std::string::npos; });
  });
}

std::string describe(const std::vector<std::string>& terms) {
  std::string out = "[";
  for (const auto& t : terms) out += (out.size() > 1 ? ", \"" : "\"") + t + "\"";
  return out + "]";
}

std::vector<std::string> read_terms(const json& node) {
  if (node.is_string()) return {node.get<std::string>()};
  if (node.is_array()) {
    std::vector<std::string> terms;
    for (const auto& t : node) terms.push_back(t.get<std::string>());
    return terms;
  }
  throw Error(ErrorCode::kInvalidConfig, "\"match\" must be a string or an array of strings");
}

class ScriptedBackend final : public Backend {
 public:
  ScriptedBackend(ScriptedSpec spec, std::optional<Vocabulary> vocab)
      : spec_(std::move(spec)), vocab_(std::move(vocab)) {
    caps_ = spec_.capabilities.value_or(
        Capabilities{!spec_.chat.empty() || spec_.default_reply.has_value(), vocab_.has_value()});
    if (caps_.logits && !vocab_) {
      throw Error(ErrorCode::kInvalidConfig, "scripted logits require a vocabulary");
    }
    for (std::size_t i = 0; i < spec_.chat.size(); ++i) {
      if (spec_.chat[i].match.empty()) {
        throw Error(ErrorCode::kInvalidConfig, "chat rule without match terms; use default_reply");
      }
      for (std::size_t j = 0; j < i; ++j) {
        const auto& a = spec_.chat[i].match;
        const auto& b = spec_.chat[j].match;
        if (implies(a, b) || implies(b, a)) {
          throw Error(ErrorCode::kSpecConflict,
                      "chat patterns " + describe(b) + " and " + describe(a) + " overlap");
        }
      }
    }
    for (std::size_t i = 0; i < spec_.logits.size(); ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        const auto& a = spec_.logits[i];
        const auto& b = spec_.logits[j];
        const bool same_state = !a.at_state || !b.at_state || *a.at_state == *b.at_state;
        if (same_state && (implies(a.match, b.match) || implies(b.match, a.match))) {
          throw Error(ErrorCode::kSpecConflict,
                      "logit patterns " + describe(b.match) + " and " + describe(a.match) +
                          " overlap");
        }
      }
    }
  }

  BackendDescriptor descriptor() const override {
    return {BackendKind::kScripted, "", "scripted", caps_};
  }

  std::size_t vocab_size() const override { return vocab_ ? vocab_->size() : 0; }

 protected:
  std::string do_complete_chat(const ChatRequest& request) override {
    const std::string content = request.joined_content();
    const ChatRule* hit = nullptr;
    for (const auto& rule : spec_.chat) {
      if (!matches(rule.match, content)) continue;
      if (hit) {
        throw Error(ErrorCode::kSpecConflict, "request matches both " + describe(hit->match) +
                                                  " and " + describe(rule.match));
      }
      hit = &rule;
    }
    if (hit) return hit->reply;
    if (spec_.default_reply) return *spec_.default_reply;
    throw Error(ErrorCode::kBackendFailure, "no scripted reply for request");
  }

  std::vector<double> do_next_token_logits(const LogitQuery& query) override {
    const LogitRule* hit = nullptr;
    for (const auto& rule : spec_.logits) {
      if (rule.at_state && *rule.at_state != query.state) continue;
      if (!matches(rule.match, query.prompt)) continue;
      if (hit) {
        throw Error(ErrorCode::kSpecConflict, "decoding position matches both " +
                                                  describe(hit->match) + " and " +
                                                  describe(rule.match));
      }
      hit = &rule;
    }
    std::vector<double> logits(vocab_->size(), 0.0);
    const std::optional<std::string>* target = &spec_.default_reply;
    if (hit) {
      for (const auto& text : hit->favor) {
        if (auto id = vocab_->find(text)) logits[static_cast<std::size_t>(*id)] += kFavorBonus;
      }
      target = &hit->target;
    }
    if (*target) add_target_bonus(**target, query.emitted, logits);
    return logits;
  }

 private:
  void add_target_bonus(std::string_view target, std::span<const TokenId> emitted,
                        std::vector<double>& logits) const {
    const std::string so_far = vocab_->decode(emitted);
    if (!target.starts_with(so_far)) return;
    const std::string_view rest = target.substr(so_far.size());
    for (std::size_t id = 0; id < logits.size(); ++id) {
      const auto text = vocab_->token_text(static_cast<TokenId>(id));
      if (rest.starts_with(text)) {
        logits[id] += kTargetBonusPerByte * static_cast<double>(text.size());
      }
    }
  }

  ScriptedSpec spec_;
  std::optional<Vocabulary> vocab_;
  Capabilities caps_;
};

}  // namespace

ScriptedSpec ScriptedSpec::from_json(std::istream& in) {
  json root;
  try {
    root = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidConfig, std::string("invalid fixture JSON: ") + e.what());
  }
  ScriptedSpec spec;
  try {
    for (const auto& entry : root.value("chat", json::array())) {
      spec.chat.push_back({read_terms(entry.at("match")), entry.at("reply").get<std::string>()});
    }
    if (root.contains("default_reply")) {
      spec.default_reply = root["default_reply"].get<std::string>();
    }
    for (const auto& entry : root.value("logits", json::array())) {
      LogitRule rule;
      if (entry.contains("at_state")) {
        const auto name = entry["at_state"].get<std::string>();
        rule.at_state = parse_state_tag(name);
        if (!rule.at_state) throw Error(ErrorCode::kInvalidConfig, "unknown state tag " + name);
      }
      if (entry.contains("match")) rule.match = read_terms(entry["match"]);
      for (const auto& f : entry.value("favor", json::array())) {
        rule.favor.push_back(f.get<std::string>());
      }
      if (entry.contains("target")) rule.target = entry["target"].get<std::string>();
      spec.logits.push_back(std::move(rule));
    }
    if (root.contains("capabilities")) {
      const auto& c = root["capabilities"];
      spec.capabilities = Capabilities{c.value("chat", false), c.value("logits", false)};
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidConfig, std::string("malformed fixture: ") + e.what());
  }
  return spec;
}

ScriptedSpec ScriptedSpec::from_json_text(const std::string& text) {
  std::istringstream in(text);
  return from_json(in);
}

ScriptedSpec ScriptedSpec::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot open fixture " + path.string());
  return from_json(in);
}

std::shared_ptr<Backend> make_scripted_backend(ScriptedSpec spec, std::optional<Vocabulary> vocab) {
  return std::make_shared<ScriptedBackend>(std::move(spec), std::move(vocab));
}

}  // namespace dicore
