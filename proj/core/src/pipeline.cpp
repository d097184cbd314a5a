#include "dicore/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <limits>
#include <set>
#include <thread>
#include <utility>

#include <json.hpp>

#include "dicore/automaton.hpp"
#include "dicore/decoder.hpp"
#include "dicore/error.hpp"
#include "dicore/eval.hpp"
#include "dicore/text.hpp"

namespace dicore {
namespace {

constexpr std::uint64_t kDreamerStream = 1;
constexpr std::uint64_t kGrounderStream = 2;
constexpr std::uint64_t kBaselineStream = 3;
constexpr std::uint64_t kJudgeStream = 16;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(seed ^ splitmix64(stream));
}

std::string ontology_lines(std::span<const EventType> types, bool names_only) {
  std::string out;
  for (const auto& t : types) {
    out += "- " + t.name;
    if (!names_only && t.definition && !t.definition->empty()) out += ": " + *t.definition;
    out += '\n';
  }
  if (!out.empty()) out.pop_back();
  return out;
}

std::string pairs_json(std::span<const FreeFormMention> mentions) {
  auto arr = nlohmann::json::array();
  for (const auto& m : mentions) arr.push_back({m.event_name, m.trigger});
  return arr.dump();
}

template <typename T>
void dedupe_in_place(std::vector<T>& items) {
  std::vector<T> out;
  out.reserve(items.size());
  for (auto& item : items) {
    if (std::find(out.begin(), out.end(), item) == out.end()) out.push_back(std::move(item));
  }
  items = std::move(out);
}

bool is_reply_noise(char c) {
  return std::isspace(static_cast<unsigned char>(c)) || c == '"' || c == '\'' || c == '*' ||
         c == '`' || c == '.' || c == ':' || c == '[' || c == ']';
}

std::vector<GroundedMention> parse_canonical(const std::string& text) {
  std::vector<GroundedMention> out;
  const auto doc = nlohmann::json::parse(text, nullptr, false);
  if (!doc.is_array()) {
    throw Error(ErrorCode::kParseFailure, "grounder output is not a JSON array: " + text);
  }
  for (const auto& pair : doc) {
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_string() || !pair[1].is_string()) {
      throw Error(ErrorCode::kParseFailure, "grounder output has a malformed pair: " + text);
    }
    out.push_back({pair[0].get<std::string>(), pair[1].get<std::string>()});
  }
  return out;
}

}  // namespace

std::string_view to_string(PromptStyle style) {
  switch (style) {
    case PromptStyle::kDicore: return "dicore";
    case PromptStyle::kMd: return "md";
    case PromptStyle::kMs: return "ms";
  }
  return "";
}

std::optional<PromptStyle> parse_prompt_style(std::string_view name) {
  const std::string folded = text::fold_case(name);
  if (folded == "dicore") return PromptStyle::kDicore;
  if (folded == "md") return PromptStyle::kMd;
  if (folded == "ms") return PromptStyle::kMs;
  return std::nullopt;
}

void PipelineConfig::validate() const {
  if (!(temperature >= 0.0) || !std::isfinite(temperature)) {
    throw Error(ErrorCode::kInvalidConfig, "temperature must be a finite value >= 0");
  }
  if (!(top_p > 0.0 && top_p <= 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "top_p must be in (0, 1]");
  }
  if (runs < 1) throw Error(ErrorCode::kInvalidConfig, "runs must be positive");
  if (max_mentions < 1) throw Error(ErrorCode::kInvalidConfig, "max_mentions must be positive");
  if (dreamer_max_tokens < 1 || judge_max_tokens < 1) {
    throw Error(ErrorCode::kInvalidConfig, "token budgets must be positive");
  }
  try {
    atomization.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::kInvalidConfig, e.what());
  }
}

SamplingParams PipelineConfig::sampling(int max_new_tokens, std::uint64_t seed) const {
  SamplingParams p;
  p.temperature = temperature;
  p.top_p = top_p;
  p.max_new_tokens = max_new_tokens;
  p.seed = seed;
  return p;
}

std::optional<bool> parse_judge_reply(std::string_view reply) {
  std::size_t i = 0;
  while (i < reply.size() && is_reply_noise(reply[i])) ++i;
  const std::string rest = text::fold_case(reply.substr(i));
  const auto word_ends = [&](std::size_t n) {
    return rest.size() == n || !std::isalpha(static_cast<unsigned char>(rest[n]));
  };
  if (rest.starts_with("yes") && word_ends(3)) return true;
  if (rest.starts_with("no") && word_ends(2)) return false;
  return std::nullopt;
}

std::uint64_t document_seed(std::uint64_t run_seed, std::string_view doc_id) {
  return fnv1a64(doc_id) ^ splitmix64(run_seed);
}

std::vector<GroundedMention> order_by_text(std::vector<GroundedMention> mentions,
                                           std::string_view text) {
  std::vector<std::pair<std::size_t, GroundedMention>> keyed;
  keyed.reserve(mentions.size());
  for (auto& m : mentions) {
    const auto span = map_to_span(m.trigger, text);
    keyed.emplace_back(span ? span->begin : std::numeric_limits<std::size_t>::max(),
                       std::move(m));
  }
  std::stable_sort(keyed.begin(), keyed.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<GroundedMention> out;
  out.reserve(keyed.size());
  for (auto& [_, m] : keyed) out.push_back(std::move(m));
  return out;
}

std::string trace_to_json(const StageTrace& trace) {
  nlohmann::json j;
  j["dreamer"] = nlohmann::json::array();
  for (const auto& m : trace.dreamed) j["dreamer"].push_back({m.event_name, m.trigger});
  j["grounder"] = nlohmann::json::array();
  for (const auto& m : trace.grounded) j["grounder"].push_back({m.event_type, m.trigger});
  j["judge"] = nlohmann::json::array();
  for (const auto& v : trace.verdicts) {
    nlohmann::json entry = {{"event_type", v.mention.event_type},
                            {"trigger", v.mention.trigger},
                            {"accepted", v.accepted},
                            {"reply", v.raw_reply}};
    if (v.flagged) entry["flagged"] = true;
    j["judge"].push_back(std::move(entry));
  }
  if (!trace.diagnostics.empty()) j["diagnostics"] = trace.diagnostics;
  return j.dump();
}

Pipeline::Pipeline(EventOntology ontology, PipelineBackends backends,
                   std::optional<Vocabulary> vocab, PipelineConfig config, PromptSet prompts)
    : ontology_(std::move(ontology)),
      backends_(std::move(backends)),
      vocab_(std::move(vocab)),
      config_(std::move(config)),
      prompts_(std::move(prompts)) {
  config_.validate();
  const auto has_chat = [](const std::shared_ptr<Backend>& b) {
    return b && b->descriptor().capabilities.chat;
  };
  if (config_.prompt_style == PromptStyle::kDicore) {
    if (!backends_.logits || !backends_.logits->descriptor().capabilities.logits) {
      throw Error(ErrorCode::kCapabilityMismatch,
                  "dicore style needs a backend exposing next-token logits for the grounder");
    }
    if (!vocab_) {
      throw Error(ErrorCode::kCapabilityMismatch, "dicore style needs a logit vocabulary");
    }
    if (backends_.logits->vocab_size() != vocab_->size()) {
      throw Error(ErrorCode::kCapabilityMismatch,
                  "logit backend vocabulary size " +
                      std::to_string(backends_.logits->vocab_size()) +
                      " differs from vocabulary size " + std::to_string(vocab_->size()));
    }
  }
  if (!has_chat(backends_.chat)) {
    throw Error(ErrorCode::kCapabilityMismatch,
                std::string(to_string(config_.prompt_style)) +
                    " style needs a chat-capable backend");
  }
  ontology_block_ = ontology_lines(ontology_.types(), false);
  ontology_names_block_ = ontology_lines(ontology_.types(), true);
}

std::string Pipeline::chat(std::string prompt, int max_tokens,
                           std::uint64_t seed) const {
  ChatRequest request;
  request.messages.push_back({Role::kUser, std::move(prompt)});
  request.sampling = config_.sampling(max_tokens, seed);
  return backends_.chat->complete_chat(request);
}

std::vector<FreeFormMention> Pipeline::dreamer(const Document& doc, std::uint64_t seed,
                                               std::vector<std::string>* diagnostics) const {
  const std::string prompt =
      render(prompts_.get(PromptKind::kDreamer), {{"sentence", doc.text()}});
  const std::string reply =
      chat(prompt, config_.dreamer_max_tokens, seed);
  std::vector<FreeFormMention> mentions;
  try {
    mentions = parse_freeform_json(reply);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kParseFailure) throw;
    if (diagnostics) diagnostics->push_back(std::string("dreamer: ") + e.what());
    return {};
  }
  for (auto& m : mentions) {
    m.trigger_in_text = text::contains_case_insensitive(doc.text(), m.trigger);
    if (!m.trigger_in_text && diagnostics) {
      diagnostics->push_back("dreamer: trigger \"" + m.trigger + "\" not in text");
    }
  }
  return mentions;
}

std::string Pipeline::render_grounder_prompt(const Document& doc,
                                             std::span<const FreeFormMention> dreamed) const {
  if (config_.ontology_names_only) {
    return render(prompts_.get(PromptKind::kGrounderNamesOnly),
                  {{"ontology_names", ontology_names_block_},
                   {"sentence", doc.text()},
                   {"dreamed", pairs_json(dreamed)}});
  }
  return render(prompts_.get(PromptKind::kGrounder), {{"ontology", ontology_block_},
                                                      {"sentence", doc.text()},
                                                      {"dreamed", pairs_json(dreamed)}});
}

std::vector<GroundedMention> Pipeline::grounder(const Document& doc,
                                                std::span<const FreeFormMention> dreamed,
                                                std::uint64_t seed,
                                                std::string* raw_output) const {
  if (!backends_.logits || !vocab_) {
    throw Error(ErrorCode::kCapabilityMismatch, "grounder needs a logit backend and vocabulary");
  }
  const auto automaton =
      build_grounder_fsm(ontology_, doc, config_.atomization, *vocab_, config_.max_mentions);
  const std::string prompt = render_grounder_prompt(doc, dreamed);
  // The grammar bounds the output length, so the token budget is the longest path.
  const auto params = config_.sampling(
      static_cast<int>(std::min<std::size_t>(automaton.longest_path(),
                                             std::numeric_limits<int>::max())),
      seed);
  const DecodeResult result = decode(automaton, *backends_.logits, prompt, params);
  if (raw_output) *raw_output = result.text;
  auto mentions = parse_canonical(result.text);
  dedupe_in_place(mentions);
  return mentions;
}

JudgeVerdict Pipeline::judge(const GroundedMention& mention, const Document& doc,
                             std::uint64_t seed) const {
  std::string definition;
  for (const auto& t : ontology_.types()) {
    if (t.name == mention.event_type && t.definition && !t.definition->empty()) {
      definition = " (" + *t.definition + ")";
    }
  }
  const std::string prompt = render(prompts_.get(PromptKind::kJudge),
                                    {{"sentence", doc.text()},
                                     {"event_type", mention.event_type},
                                     {"event_definition", definition},
                                     {"trigger", mention.trigger}});
  JudgeVerdict verdict;
  verdict.mention = mention;
  verdict.raw_reply = chat(prompt, config_.judge_max_tokens, seed);
  const auto parsed = parse_judge_reply(verdict.raw_reply);
  verdict.accepted = parsed.value_or(false);
  verdict.flagged = !parsed.has_value();
  return verdict;
}

std::vector<GroundedMention> Pipeline::apply_judge(const Document& doc,
                                                   std::span<const GroundedMention> mentions,
                                                   std::uint64_t seed,
                                                   StageTrace& trace) const {
  if (!config_.judge_enabled) return {mentions.begin(), mentions.end()};
  std::vector<GroundedMention> kept;
  for (std::size_t i = 0; i < mentions.size(); ++i) {
    auto verdict = judge(mentions[i], doc, stream_seed(seed, kJudgeStream + i));
    if (verdict.flagged) {
      trace.diagnostics.push_back("judge: unparseable reply \"" + verdict.raw_reply + "\"");
    }
    if (verdict.accepted) kept.push_back(mentions[i]);
    trace.verdicts.push_back(std::move(verdict));
  }
  return kept;
}

std::vector<GroundedMention> Pipeline::filter_freeform(const Document& doc,
                                                       std::span<const FreeFormMention> raw,
                                                       StageTrace& trace) const {
  const auto candidates = atomize(doc, config_.atomization);
  std::vector<GroundedMention> kept;
  for (const auto& m : raw) {
    GroundedMention g{m.event_name, m.trigger};
    const auto violations = validate_mention(g, ontology_, candidates);
    if (violations.empty()) {
      kept.push_back(std::move(g));
      continue;
    }
    std::string why;
    for (const auto v : violations) why += std::string(why.empty() ? "" : ",") + std::string(to_string(v));
    trace.diagnostics.push_back("filter: dropped [\"" + m.event_name + "\", \"" + m.trigger +
                                "\"] (" + why + ")");
  }
  dedupe_in_place(kept);
  return kept;
}

std::vector<GroundedMention> Pipeline::run_dicore(const Document& doc, std::uint64_t seed,
                                                  StageTrace& trace) const {
  trace.dreamed = dreamer(doc, stream_seed(seed, kDreamerStream), &trace.diagnostics);
  trace.grounded =
      grounder(doc, trace.dreamed, stream_seed(seed, kGrounderStream), &trace.grounder_output);
  return apply_judge(doc, trace.grounded, seed, trace);
}

std::vector<GroundedMention> Pipeline::run_md(const Document& doc, std::uint64_t seed,
                                              StageTrace& trace) const {
  const std::string prompt = render(prompts_.get(PromptKind::kDirect),
                                    {{"ontology", ontology_block_}, {"sentence", doc.text()}});
  const std::string reply = chat(prompt, config_.dreamer_max_tokens,
                                 stream_seed(seed, kBaselineStream));
  trace.grounder_output = reply;
  try {
    trace.dreamed = parse_freeform_json(reply);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kParseFailure) throw;
    trace.diagnostics.push_back(std::string("md: ") + e.what());
  }
  trace.grounded = filter_freeform(doc, trace.dreamed, trace);
  return apply_judge(doc, trace.grounded, seed, trace);
}

std::vector<GroundedMention> Pipeline::run_ms(const Document& doc, std::uint64_t seed,
                                              StageTrace& trace) const {
  const std::string stage1 = render(prompts_.get(PromptKind::kStagedTypes),
                                    {{"ontology", ontology_block_}, {"sentence", doc.text()}});
  const std::string reply1 = chat(stage1, config_.dreamer_max_tokens,
                                  stream_seed(seed, kBaselineStream));
  std::vector<std::string> selected;
  try {
    for (auto& name : parse_string_list(reply1)) {
      if (ontology_.contains(name) &&
          std::find(selected.begin(), selected.end(), name) == selected.end()) {
        selected.push_back(std::move(name));
      } else if (!ontology_.contains(name)) {
        trace.diagnostics.push_back("ms: stage 1 type \"" + name + "\" not in ontology");
      }
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kParseFailure) throw;
    trace.diagnostics.push_back(std::string("ms stage 1: ") + e.what());
  }
  if (selected.empty()) return {};

  const std::string stage2 =
      render(prompts_.get(PromptKind::kStagedTriggers),
             {{"selected", nlohmann::json(selected).dump()}, {"sentence", doc.text()}});
  const std::string reply2 = chat(stage2,
                                  config_.dreamer_max_tokens,
                                  stream_seed(seed, kBaselineStream + 1));
  trace.grounder_output = reply2;
  try {
    trace.dreamed = parse_freeform_json(reply2);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kParseFailure) throw;
    trace.diagnostics.push_back(std::string("ms stage 2: ") + e.what());
  }
  trace.grounded = filter_freeform(doc, trace.dreamed, trace);
  return apply_judge(doc, trace.grounded, seed, trace);
}

std::vector<GroundedMention> Pipeline::run_document(const Document& doc, std::uint64_t seed,
                                                    StageTrace* trace) const {
  StageTrace local;
  StageTrace& t = trace ? *trace : local;
  t = StageTrace{};
  std::vector<GroundedMention> out;
  switch (config_.prompt_style) {
    case PromptStyle::kDicore: out = run_dicore(doc, seed, t); break;
    case PromptStyle::kMd: out = run_md(doc, seed, t); break;
    case PromptStyle::kMs: out = run_ms(doc, seed, t); break;
  }
  dedupe_in_place(out);
  return order_by_text(std::move(out), doc.text());
}

std::vector<DocumentResult> Pipeline::run_batch(std::span<const Document> docs,
                                                std::uint64_t run_seed, int jobs) const {
  std::vector<DocumentResult> results(docs.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < docs.size(); i = next++) {
      DocumentResult& r = results[i];
      r.id = docs[i].id();
      try {
        r.mentions = run_document(docs[i], document_seed(run_seed, r.id), &r.trace);
      } catch (const std::exception& e) {
        r.mentions.clear();
        r.error = e.what();
        r.trace.diagnostics.push_back(e.what());
      }
    }
  };
  const std::size_t n_threads =
      std::clamp<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), 1,
                              std::max<std::size_t>(docs.size(), 1));
  if (n_threads == 1) {
    worker();
    return results;
  }
  std::vector<std::jthread> threads;
  threads.reserve(n_threads);
  for (std::size_t t = 0; t < n_threads; ++t) threads.emplace_back(worker);
  threads.clear();
  return results;
}

}  // namespace dicore
