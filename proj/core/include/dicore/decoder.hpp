#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "dicore/automaton.hpp"
#include "dicore/backend.hpp"
#include "dicore/sampling.hpp"

namespace dicore {

struct DecodeResult {
  std::string text;
  std::vector<TokenId> tokens;
  int mention_count = 0;
};

/// FSM-guided generation: at every step fetch logits for prompt + emitted
/// tokens, restrict them to the automaton's allowed set, sample with
/// temperature and top-p, and advance until the accepting state. The returned
/// text is always in the automaton's language. Uses params.seed (0 if unset)
/// for the sampler. Backend errors propagate.
DecodeResult decode(const TokenAutomaton& automaton, Backend& backend, std::string_view prompt,
                    const SamplingParams& params);

}  // namespace dicore
