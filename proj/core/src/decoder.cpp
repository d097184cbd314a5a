#include "dicore/decoder.hpp"

#include <random>

#include "dicore/error.hpp"

namespace dicore {

DecodeResult decode(const TokenAutomaton& automaton, Backend& backend, std::string_view prompt,
                    const SamplingParams& params) {
  params.validate();
  if (backend.vocab_size() != automaton.vocabulary().size()) {
    throw Error(ErrorCode::kCapabilityMismatch,
                "backend vocabulary size " + std::to_string(backend.vocab_size()) +
                    " differs from automaton vocabulary size " +
                    std::to_string(automaton.vocabulary().size()));
  }
  std::mt19937_64 rng(params.seed.value_or(0));
  DecodeSession session(automaton);
  // The automaton is acyclic, so this bound is never reached by a correct build.
  const std::size_t step_limit = automaton.longest_path();
  while (!session.finished()) {
    if (session.emitted().size() >= step_limit) {
      throw Error(ErrorCode::kBudgetExceeded, "decode exceeded the automaton's longest path");
    }
    const auto logits = backend.next_token_logits({prompt, session.emitted(), session.tag()});
    session.step(sample_token(logits, session.mask(), params, rng));
  }
  DecodeResult result;
  result.tokens.assign(session.emitted().begin(), session.emitted().end());
  result.text = automaton.vocabulary().decode(result.tokens);
  result.mention_count = session.mention_count();
  return result;
}

}  // namespace dicore
