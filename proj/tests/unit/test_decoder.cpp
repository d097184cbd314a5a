#include <gtest/gtest.h>

#include <random>

#include "dicore/backend.hpp"
#include "dicore/decoder.hpp"
#include "dicore/error.hpp"
#include "dicore/scripted_backend.hpp"
#include "oracles.hpp"

using namespace dicore;

namespace {

Vocabulary bpe() { return load_vocabulary_file(oracle::data_dir() / "vocab_bpe.json"); }

/// Puts all mass on the first token of "[]" wherever it is allowed.
class EmptyListBackend final : public Backend {
 public:
  explicit EmptyListBackend(Vocabulary v) : v_(std::move(v)) {}
  BackendDescriptor descriptor() const override {
    return {BackendKind::kScripted, "", "empty", {false, true}};
  }
  std::size_t vocab_size() const override { return v_.size(); }

 protected:
  std::vector<double> do_next_token_logits(const LogitQuery&) override {
    std::vector<double> l(v_.size(), 0.0);
    l[static_cast<std::size_t>(*v_.find("[]"))] = 1e6;
    return l;
  }

 private:
  Vocabulary v_;
};

class CountingBackend final : public Backend {
 public:
  explicit CountingBackend(std::size_t n) : n_(n) {}
  BackendDescriptor descriptor() const override {
    return {BackendKind::kScripted, "", "count", {false, true}};
  }
  std::size_t vocab_size() const override { return n_; }
  int calls = 0;

 protected:
  std::vector<double> do_next_token_logits(const LogitQuery& q) override {
    ++calls;
    EXPECT_EQ(q.prompt, "PROMPT");
    return std::vector<double>(n_, 0.0);
  }

 private:
  std::size_t n_;
};

}  // namespace

TEST(Decode, ForcedEmptyList) {
  const auto v = bpe();
  const std::vector<std::string> cands{"war", "attack"};
  const auto a = build_grounder_fsm(EventOntology({{"Attack", std::nullopt}}), cands, v, 3);
  EmptyListBackend backend(v);
  const auto r = decode(a, backend, "p", SamplingParams{});
  EXPECT_EQ(r.text, "[]");
  EXPECT_EQ(r.mention_count, 0);
}

TEST(Decode, ScriptedTargetReachesGroundedOutput) {
  const auto v = bpe();
  const EventOntology ace({{"Life:Be-Born", std::nullopt}, {"Life:Die", std::nullopt},
                           {"Conflict:Attack", std::nullopt}});
  const Document doc("d", "cass apd ra gave birth to her first daughter.");
  const auto a = build_grounder_fsm(ace, doc, AtomizationPolicy::single_word(), v);
  ScriptedSpec spec;
  spec.logits.push_back({std::nullopt, {"daughter"}, {}, R"([["Life:Be-Born","birth"]])"});
  auto backend = make_scripted_backend(spec, v);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    SamplingParams p;
    p.seed = seed;
    const auto r = decode(a, *backend, doc.text(), p);
    EXPECT_EQ(r.text, R"([["Life:Be-Born","birth"]])");
    EXPECT_EQ(r.mention_count, 1);
  }
}

TEST(Decode, RandomBackendOutputsAreValid) {
  const auto v = bpe();
  const EventOntology o({{"Attack", std::nullopt}, {"Quote\"Type", std::nullopt}});
  const Document doc("d", "troops fired at say\"hi city, back\\sl");
  const auto cands = atomize(doc, AtomizationPolicy::single_word());
  const auto a = build_grounder_fsm(o, cands, v, 4);
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    RandomLogitBackend backend(v.size(), seed);
    SamplingParams p;
    p.seed = seed;
    const auto r = decode(a, backend, "prompt", p);
    const auto pairs = oracle::parse_canonical(r.text);
    ASSERT_TRUE(pairs.has_value()) << r.text;
    EXPECT_LE(pairs->size(), 4u);
    EXPECT_EQ(static_cast<int>(pairs->size()), r.mention_count);
    for (const auto& [e, t] : *pairs) {
      EXPECT_TRUE(validate_mention({e, t}, o, cands).empty()) << r.text;
    }
  }
}

TEST(Decode, TerminatesWithinLongestPath) {
  const auto v = bpe();
  const std::vector<std::string> cands{"x", "y"};
  const auto a = build_grounder_fsm(EventOntology({{"A", std::nullopt}}), cands, v, 3);
  CountingBackend backend(v.size());
  SamplingParams p;
  p.seed = 4;
  const auto r = decode(a, backend, "PROMPT", p);
  EXPECT_LE(static_cast<std::size_t>(backend.calls), a.longest_path());
  EXPECT_EQ(static_cast<std::size_t>(backend.calls), r.tokens.size());
}

TEST(Decode, DeterministicForFixedSeed) {
  const auto v = bpe();
  const std::vector<std::string> cands{"war", "attack", "the"};
  const auto a = build_grounder_fsm(EventOntology({{"A", std::nullopt}, {"B", std::nullopt}}),
                                    cands, v, 5);
  RandomLogitBackend backend(v.size(), 99);
  SamplingParams p;
  p.seed = 123;
  EXPECT_EQ(decode(a, backend, "q", p).text, decode(a, backend, "q", p).text);
  p.temperature = 0.0;
  EXPECT_EQ(decode(a, backend, "q", p).text, decode(a, backend, "q", p).text);
}

TEST(Decode, VocabularySizeMismatch) {
  const auto v = bpe();
  const std::vector<std::string> cands{"x"};
  const auto a = build_grounder_fsm(EventOntology({{"A", std::nullopt}}), cands, v, 1);
  UniformLogitBackend wrong(v.size() + 1);
  try {
    decode(a, wrong, "p", SamplingParams{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kCapabilityMismatch);
  }
}
