#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dicore {

using TokenId = std::int32_t;

/// Built-in canonical encoders for offline and test vocabularies.
enum class EncoderMode {
  kChar,                ///< one token per UTF-8 code point
  kWord,                ///< alphanumeric runs, other code points singly; falls back to chars
  kGreedyLongestMatch,  ///< left-to-right longest token match
};

std::string_view to_string(EncoderMode mode);
std::optional<EncoderMode> parse_encoder_mode(std::string_view name);

/// Token table plus its canonical encoder. Immutable and cheap to copy: copies
/// share the underlying table, so a Vocabulary can be handed to any number of
/// automata, backends and threads.
///
/// Token ids are dense in [0, size()). Token texts are unique and non-empty.
/// The default decoder concatenates token texts.
class Vocabulary {
 public:
  /// Returns std::nullopt when `text` is not encodable.
  using EncodeFn = std::function<std::optional<std::vector<TokenId>>(std::string_view)>;

  Vocabulary(std::vector<std::string> tokens, EncoderMode mode);
  /// Programmatic vocabulary for live backends. `encoder` must be canonical and
  /// round-trip through concatenation of token texts.
  Vocabulary(std::vector<std::string> tokens, EncodeFn encoder);

  std::size_t size() const;
  std::string_view token_text(TokenId id) const;
  std::optional<TokenId> find(std::string_view token_text) const;
  std::optional<EncoderMode> mode() const;

  std::optional<std::vector<TokenId>> try_encode(std::string_view text) const;
  /// Throws VOCAB_CANNOT_ENCODE naming the offending text.
  std::vector<TokenId> encode(std::string_view text) const;
  /// Throws INVALID_ARGUMENT on an out-of-range id.
  std::string decode(std::span<const TokenId> tokens) const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

/// Reads `{"tokens": [...], "mode"?: "char"|"word"|"greedy_bpe_longest_match"}`.
/// `mode_override` wins over the file; one of the two must be present.
Vocabulary load_vocabulary(std::istream& source,
                           std::optional<EncoderMode> mode_override = std::nullopt);
Vocabulary load_vocabulary_file(const std::filesystem::path& path,
                                std::optional<EncoderMode> mode_override = std::nullopt);

/// Tokens for `text` when it follows `left_context`: the canonical encoding of
/// decode(left_context) + text with the left_context prefix removed. When the
/// canonical encoding merges across the boundary, the already-emitted context
/// stays committed and `text` is encoded on its own. Either way
/// decode(left_context) + decode(result) == decode(left_context) + text.
std::vector<TokenId> canonical_token_path(const Vocabulary& vocab, std::string_view text,
                                          std::span<const TokenId> left_context = {});

}  // namespace dicore
