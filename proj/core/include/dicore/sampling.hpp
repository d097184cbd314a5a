#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "dicore/automaton.hpp"

namespace dicore {

struct SamplingParams {
  static constexpr double kDefaultTemperature = 0.4;
  static constexpr double kDefaultTopP = 0.9;

  double temperature = kDefaultTemperature;  ///< 0 selects argmax decoding
  double top_p = kDefaultTopP;               ///< in (0, 1]
  int max_new_tokens = 512;
  std::optional<std::uint64_t> seed;

  /// Throws INVALID_ARGUMENT for out-of-range values.
  void validate() const;
};

/// Softmax restricted to `mask`: disallowed entries are exactly 0, allowed
/// entries keep their unrestricted pairwise ratios and sum to 1.
/// Throws EMPTY_MASK, or INVALID_ARGUMENT when a masked id is out of range.
std::vector<double> apply_mask(std::span<const double> logits, const LogitMask& mask);

/// Draws one allowed token: logits are divided by the temperature, masked and
/// renormalized, then truncated to the smallest highest-probability prefix whose
/// mass reaches top_p (the most probable allowed token is always kept).
/// Temperature 0 returns the allowed argmax, lowest id on ties.
TokenId sample_token(std::span<const double> logits, const LogitMask& mask,
                     const SamplingParams& params, std::mt19937_64& rng);

}  // namespace dicore
