#include <benchmark/benchmark.h>

#include <random>
#include <set>
#include <string>
#include <vector>

#include "dicore/automaton.hpp"
#include "dicore/backend.hpp"
#include "dicore/decoder.hpp"
#include "dicore/sampling.hpp"

namespace {

using namespace dicore;

std::string random_word(std::mt19937_64& rng, int min, int max) {
  std::uniform_int_distribution<int> len(min, max), letter('a', 'z');
  std::string w;
  for (int i = len(rng); i > 0; --i) w += static_cast<char>(letter(rng));
  return w;
}

struct Fixture {
  EventOntology ontology;
  Document doc;
  Vocabulary vocab;
};

// Synthetic ontology of `types` names, a `words`-word sentence and a greedy
// vocabulary of `vocab_size` entries seeded with their substrings.
Fixture make_fixture(std::size_t types, int words, std::size_t vocab_size) {
  std::mt19937_64 rng(types * 131 + static_cast<std::size_t>(words));
  std::vector<EventType> ev;
  std::set<std::string> names;
  while (ev.size() < types) {
    auto n = random_word(rng, 4, 12);
    if (names.insert(n).second) ev.push_back({n, std::nullopt});
  }
  std::string sentence;
  for (int i = 0; i < words; ++i) sentence += (i ? " " : "") + random_word(rng, 2, 9);

  std::vector<std::string> tokens;
  std::set<std::string> seen;
  const auto add = [&](std::string t) {
    if (tokens.size() < vocab_size && seen.insert(t).second) tokens.push_back(std::move(t));
  };
  for (char c = 0x20; c < 0x7f; ++c) add(std::string(1, c));
  for (const char* lit : {"[[\"", "\",\"", "\"]", "\"],[\"", "\"]]"}) add(lit);
  for (const auto& n : names) {
    for (std::size_t len = 2; len <= n.size(); len += 2) add(n.substr(0, len));
  }
  while (tokens.size() < vocab_size) add(random_word(rng, 2, 8));
  return {EventOntology(std::move(ev)), Document("bench", sentence),
          Vocabulary(std::move(tokens), EncoderMode::kGreedyLongestMatch)};
}

void BM_BuildFsm(benchmark::State& state) {
  const auto f = make_fixture(static_cast<std::size_t>(state.range(0)), 30, 32000);
  for (auto _ : state) {
    auto fsm = build_grounder_fsm(f.ontology, f.doc, AtomizationPolicy::substring(5), f.vocab);
    benchmark::DoNotOptimize(fsm.num_states());
  }
}
BENCHMARK(BM_BuildFsm)->Arg(33)->Arg(168)->Unit(benchmark::kMillisecond);

void BM_MaskLookup(benchmark::State& state) {
  const auto f = make_fixture(168, 30, 32000);
  const auto fsm = build_grounder_fsm(f.ontology, f.doc, AtomizationPolicy::substring(5), f.vocab);
  std::mt19937_64 rng(3);
  std::vector<StateId> probes(4096);
  for (auto& s : probes) s = static_cast<StateId>(rng() % fsm.num_states());
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fsm.allowed(probes[i++ & 4095]).size());
  }
}
BENCHMARK(BM_MaskLookup);

void BM_ApplyMask(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal;
  std::vector<double> logits(n);
  for (auto& l : logits) l = normal(rng);
  std::vector<TokenId> allowed;
  for (std::size_t i = 0; i < n; i += 7) allowed.push_back(static_cast<TokenId>(i));
  for (auto _ : state) {
    benchmark::DoNotOptimize(apply_mask(logits, LogitMask{allowed}));
  }
}
BENCHMARK(BM_ApplyMask)->Arg(1024)->Arg(32000);

void BM_Decode(benchmark::State& state) {
  const auto f = make_fixture(168, 30, 32000);
  const auto fsm = build_grounder_fsm(f.ontology, f.doc, AtomizationPolicy::substring(5), f.vocab);
  RandomLogitBackend backend(f.vocab.size(), 11);
  SamplingParams params;
  params.max_new_tokens = static_cast<int>(fsm.longest_path());
  std::uint64_t seed = 0;
  std::size_t tokens = 0;
  for (auto _ : state) {
    params.seed = seed++;
    tokens += decode(fsm, backend, f.doc.text(), params).tokens.size();
  }
  state.counters["tokens/iter"] =
      benchmark::Counter(static_cast<double>(tokens), benchmark::Counter::kAvgIterations);
}
BENCHMARK(BM_Decode)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
