#include <gtest/gtest.h>

#include "dicore/backend.hpp"
#include "dicore/error.hpp"
#include "dicore/scripted_backend.hpp"
#include "oracles.hpp"

using namespace dicore;

namespace {

Vocabulary bpe() { return load_vocabulary_file(oracle::data_dir() / "vocab_bpe.json"); }

ChatRequest ask(const std::string& content) {
  ChatRequest r;
  r.messages.push_back({Role::kUser, content});
  return r;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kInvalidArgument;
}

}  // namespace

TEST(ScriptedBackend, MatchesAllTerms) {
  const auto spec = ScriptedSpec::from_json_text(R"({
    "chat": [{"match": ["Be very open", "birth"], "reply": "[[\"Birth\",\"birth\"]]"},
             {"match": "Verdict:", "reply": "Yes"}]})");
  auto b = make_scripted_backend(spec);
  EXPECT_TRUE(b->descriptor().capabilities.chat);
  EXPECT_FALSE(b->descriptor().capabilities.logits);
  EXPECT_EQ(b->complete_chat(ask("Be very open ... gave birth")), "[[\"Birth\",\"birth\"]]");
  EXPECT_EQ(b->complete_chat(ask("... Verdict:")), "Yes");
  EXPECT_EQ(code_of([&] { b->complete_chat(ask("unrelated")); }), ErrorCode::kBackendFailure);
  EXPECT_EQ(code_of([&] { b->complete_chat(ask("Be very open birth Verdict:")); }),
            ErrorCode::kSpecConflict);
}

TEST(ScriptedBackend, OverlappingPatternsRejected) {
  EXPECT_EQ(code_of([] {
              make_scripted_backend(ScriptedSpec::from_json_text(R"({
      "chat": [{"match": ["birth"], "reply": "a"}, {"match": ["gave birth", "x"], "reply": "b"}]})"));
            }),
            ErrorCode::kSpecConflict);
  EXPECT_EQ(code_of([] {
              make_scripted_backend(ScriptedSpec::from_json_text(
                                        R"({"logits": [{"match": "a", "target": "[]"},
                                                      {"match": "a", "target": "[]"}]})"),
                                    bpe());
            }),
            ErrorCode::kSpecConflict);
  // Different states do not overlap.
  EXPECT_NO_THROW(make_scripted_backend(
      ScriptedSpec::from_json_text(R"({"logits": [
        {"at_state": "EVENT_CHOICE", "match": "a", "favor": ["A"]},
        {"at_state": "TRIGGER_CHOICE", "match": "a", "favor": ["x"]}]})"),
      bpe()));
}

TEST(ScriptedBackend, EmptySpecWithDefaultReply) {
  auto b = make_scripted_backend(ScriptedSpec::from_json_text(R"({"default_reply": "[]"})"), bpe());
  EXPECT_EQ(b->complete_chat(ask("anything")), "[]");
  const auto v = bpe();
  const auto logits = b->next_token_logits({"anything", {}, StateTag::kPreamble});
  ASSERT_EQ(logits.size(), v.size());
  const auto best = std::max_element(logits.begin(), logits.end()) - logits.begin();
  EXPECT_EQ(v.token_text(static_cast<TokenId>(best)), "[]");
}

TEST(ScriptedBackend, FavorAndStateFilter) {
  const auto v = bpe();
  auto b = make_scripted_backend(ScriptedSpec::from_json_text(R"({"logits": [
      {"at_state": "EVENT_CHOICE", "match": "s", "favor": ["B"]}]})"),
                                 v);
  const auto at_event = b->next_token_logits({"s", {}, StateTag::kEventChoice});
  EXPECT_EQ(at_event[static_cast<std::size_t>(*v.find("B"))], kFavorBonus);
  const auto elsewhere = b->next_token_logits({"s", {}, StateTag::kTriggerChoice});
  EXPECT_EQ(elsewhere[static_cast<std::size_t>(*v.find("B"))], 0.0);
}

TEST(ScriptedBackend, MalformedFixture) {
  EXPECT_EQ(code_of([] { ScriptedSpec::from_json_text("{"); }), ErrorCode::kInvalidConfig);
  EXPECT_EQ(code_of([] { ScriptedSpec::from_json_text(R"({"logits":[{"at_state":"NOPE"}]})"); }),
            ErrorCode::kInvalidConfig);
  EXPECT_EQ(code_of([] { ScriptedSpec::from_file("/nonexistent/fixture.json"); }),
            ErrorCode::kIoFailure);
}

TEST(Backend, CapabilityChecks) {
  UniformLogitBackend u(10);
  EXPECT_EQ(code_of([&] { u.complete_chat(ask("x")); }), ErrorCode::kCapabilityMismatch);
  auto chat_only = make_scripted_backend(ScriptedSpec::from_json_text(R"({"default_reply":"x"})"));
  EXPECT_EQ(code_of([&] { chat_only->next_token_logits({"p", {}, StateTag::kPreamble}); }),
            ErrorCode::kCapabilityMismatch);
  ChatRequest no_user;
  no_user.messages.push_back({Role::kSystem, "sys"});
  EXPECT_EQ(code_of([&] { chat_only->complete_chat(no_user); }), ErrorCode::kInvalidArgument);
}

TEST(Backend, RandomLogitsAreReproducible) {
  RandomLogitBackend a(50, 1), b(50, 1), c(50, 2);
  const std::vector<TokenId> emitted{1, 2};
  const LogitQuery q{"prompt", emitted, StateTag::kInterior};
  EXPECT_EQ(a.next_token_logits(q), b.next_token_logits(q));
  EXPECT_NE(a.next_token_logits(q), c.next_token_logits(q));
}
