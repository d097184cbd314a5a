#include "dicore/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dicore/error.hpp"

namespace dicore {

void SamplingParams::validate() const {
  if (!(temperature >= 0.0) || !std::isfinite(temperature)) {
    throw Error(ErrorCode::kInvalidArgument, "temperature must be a finite value >= 0");
  }
  if (!(top_p > 0.0 && top_p <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "top_p must lie in (0, 1]");
  }
  if (max_new_tokens < 1) {
    throw Error(ErrorCode::kInvalidArgument, "max_new_tokens must be >= 1");
  }
}

std::vector<double> apply_mask(std::span<const double> logits, const LogitMask& mask) {
  if (mask.empty()) throw Error(ErrorCode::kEmptyMask, "mask allows no tokens");
  double max_logit = -INFINITY;
  for (const TokenId id : mask.allowed) {
    if (id < 0 || static_cast<std::size_t>(id) >= logits.size()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "masked token " + std::to_string(id) + " outside logits of size " +
                      std::to_string(logits.size()));
    }
    max_logit = std::max(max_logit, logits[static_cast<std::size_t>(id)]);
  }
  std::vector<double> probs(logits.size(), 0.0);
  if (!std::isfinite(max_logit)) {
    // Every allowed logit is -inf (or NaN): fall back to uniform over the mask.
    for (const TokenId id : mask.allowed) {
      probs[static_cast<std::size_t>(id)] = 1.0 / static_cast<double>(mask.size());
    }
    return probs;
  }
  double total = 0.0;
  for (const TokenId id : mask.allowed) {
    const double e = std::exp(logits[static_cast<std::size_t>(id)] - max_logit);
    probs[static_cast<std::size_t>(id)] = e;
    total += e;
  }
  for (const TokenId id : mask.allowed) probs[static_cast<std::size_t>(id)] /= total;
  return probs;
}

TokenId sample_token(std::span<const double> logits, const LogitMask& mask,
                     const SamplingParams& params, std::mt19937_64& rng) {
  if (mask.empty()) throw Error(ErrorCode::kEmptyMask, "mask allows no tokens");
  if (mask.allowed.front() < 0 ||
      static_cast<std::size_t>(mask.allowed.back()) >= logits.size()) {
    throw Error(ErrorCode::kInvalidArgument, "mask refers to tokens outside the logits");
  }
  if (params.temperature == 0.0) {
    TokenId best = mask.allowed.front();
    for (const TokenId id : mask.allowed) {
      if (logits[static_cast<std::size_t>(id)] > logits[static_cast<std::size_t>(best)]) best = id;
    }
    return best;
  }

  // Only the allowed entries matter; work on a compact copy.
  std::vector<double> compact_logits(mask.size());
  for (std::size_t i = 0; i < mask.size(); ++i) {
    compact_logits[i] = logits[static_cast<std::size_t>(mask.allowed[i])] / params.temperature;
  }
  std::vector<TokenId> local(mask.size());
  std::iota(local.begin(), local.end(), 0);
  const auto probs = apply_mask(compact_logits, LogitMask{local});

  std::vector<std::size_t> order(mask.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return probs[a] > probs[b]; });
  std::size_t keep = 0;
  double mass = 0.0;
  while (keep < order.size()) {
    mass += probs[order[keep]];
    ++keep;
    if (mass >= params.top_p) break;
  }

  std::uniform_real_distribution<double> uniform(0.0, mass);
  double r = uniform(rng);
  for (std::size_t i = 0; i < keep; ++i) {
    r -= probs[order[i]];
    if (r < 0.0) return mask.allowed[order[i]];
  }
  return mask.allowed[order[keep - 1]];
}

}  // namespace dicore
