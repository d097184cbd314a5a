#include "dicore/vocabulary.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <unordered_map>

#include <json.hpp>

#include "dicore/error.hpp"

namespace dicore {
namespace {

std::size_t utf8_length(unsigned char lead) {
  if (lead < 0x80) return 1;
  if ((lead >> 5) == 0x6) return 2;
  if ((lead >> 4) == 0xE) return 3;
  if ((lead >> 3) == 0x1E) return 4;
  return 1;  // stray continuation byte: treat as its own unit
}

bool is_word_byte(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
         c == '_' || c >= 0x80;
}

}  // namespace

struct Vocabulary::Impl {
  std::vector<std::string> tokens;
  std::unordered_map<std::string_view, TokenId> index;
  std::size_t max_token_bytes = 0;
  std::optional<EncoderMode> mode;
  EncodeFn custom;

  explicit Impl(std::vector<std::string> t) : tokens(std::move(t)) {
    if (tokens.empty()) throw Error(ErrorCode::kMalformedVocabulary, "vocabulary is empty");
    index.reserve(tokens.size());
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      const std::string_view text = tokens[i];
      if (text.empty()) {
        throw Error(ErrorCode::kMalformedVocabulary,
                    "token " + std::to_string(i) + " has empty text");
      }
      if (!index.emplace(text, static_cast<TokenId>(i)).second) {
        throw Error(ErrorCode::kMalformedVocabulary,
                    "duplicate token text '" + tokens[i] + "'");
      }
      max_token_bytes = std::max(max_token_bytes, text.size());
    }
  }

  std::optional<TokenId> lookup(std::string_view s) const {
    auto it = index.find(s);
    if (it == index.end()) return std::nullopt;
    return it->second;
  }

  bool encode_chars(std::string_view s, std::vector<TokenId>& out) const {
    std::size_t i = 0;
    while (i < s.size()) {
      const std::size_t len =
          std::min(utf8_length(static_cast<unsigned char>(s[i])), s.size() - i);
      auto id = lookup(s.substr(i, len));
      if (!id) return false;
      out.push_back(*id);
      i += len;
    }
    return true;
  }

  std::optional<std::vector<TokenId>> encode_builtin(std::string_view s) const {
    std::vector<TokenId> out;
    switch (*mode) {
      case EncoderMode::kChar:
        if (!encode_chars(s, out)) return std::nullopt;
        return out;
      case EncoderMode::kWord: {
        std::size_t i = 0;
        while (i < s.size()) {
          std::size_t j = i;
          if (is_word_byte(static_cast<unsigned char>(s[i]))) {
            while (j < s.size() && is_word_byte(static_cast<unsigned char>(s[j]))) ++j;
          } else {
            j = i + std::min(utf8_length(static_cast<unsigned char>(s[i])), s.size() - i);
          }
          const std::string_view piece = s.substr(i, j - i);
          if (auto id = lookup(piece)) {
            out.push_back(*id);
          } else if (!encode_chars(piece, out)) {
            return std::nullopt;
          }
          i = j;
        }
        return out;
      }
      case EncoderMode::kGreedyLongestMatch: {
        std::size_t i = 0;
        while (i < s.size()) {
          std::size_t len = std::min(max_token_bytes, s.size() - i);
          std::optional<TokenId> id;
          for (; len > 0; --len) {
            if ((id = lookup(s.substr(i, len)))) break;
          }
          if (!id) return std::nullopt;
          out.push_back(*id);
          i += len;
        }
        return out;
      }
    }
    return std::nullopt;
  }
};

std::string_view to_string(EncoderMode mode) {
  switch (mode) {
    case EncoderMode::kChar: return "char";
    case EncoderMode::kWord: return "word";
    case EncoderMode::kGreedyLongestMatch: return "greedy_bpe_longest_match";
  }
  return "unknown";
}

std::optional<EncoderMode> parse_encoder_mode(std::string_view name) {
  std::string key(name);
  std::transform(key.begin(), key.end(), key.begin(),
                 [](unsigned char c) { return c == '-' ? '_' : static_cast<char>(std::tolower(c)); });
  if (key == "char") return EncoderMode::kChar;
  if (key == "word") return EncoderMode::kWord;
  if (key == "greedy_bpe_longest_match" || key == "greedy_bpe" || key == "bpe") {
    return EncoderMode::kGreedyLongestMatch;
  }
  return std::nullopt;
}

Vocabulary::Vocabulary(std::vector<std::string> tokens, EncoderMode mode) {
  auto impl = std::make_shared<Impl>(std::move(tokens));
  impl->mode = mode;
  impl_ = std::move(impl);
}

Vocabulary::Vocabulary(std::vector<std::string> tokens, EncodeFn encoder) {
  if (!encoder) throw Error(ErrorCode::kMalformedVocabulary, "custom encoder is empty");
  auto impl = std::make_shared<Impl>(std::move(tokens));
  impl->custom = std::move(encoder);
  impl_ = std::move(impl);
}

std::size_t Vocabulary::size() const { return impl_->tokens.size(); }

std::string_view Vocabulary::token_text(TokenId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= impl_->tokens.size()) {
    throw Error(ErrorCode::kInvalidArgument, "token id out of range: " + std::to_string(id));
  }
  return impl_->tokens[static_cast<std::size_t>(id)];
}

std::optional<TokenId> Vocabulary::find(std::string_view token_text) const {
  return impl_->lookup(token_text);
}

std::optional<EncoderMode> Vocabulary::mode() const { return impl_->mode; }

std::optional<std::vector<TokenId>> Vocabulary::try_encode(std::string_view text) const {
  if (impl_->custom) return impl_->custom(text);
  return impl_->encode_builtin(text);
}

std::vector<TokenId> Vocabulary::encode(std::string_view text) const {
  auto tokens = try_encode(text);
  if (!tokens) {
    throw Error(ErrorCode::kVocabCannotEncode,
                "vocabulary cannot encode \"" + std::string(text) + "\"");
  }
  return std::move(*tokens);
}

std::string Vocabulary::decode(std::span<const TokenId> tokens) const {
  std::string out;
  for (const TokenId id : tokens) out += token_text(id);
  return out;
}

Vocabulary load_vocabulary(std::istream& source, std::optional<EncoderMode> mode_override) {
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(source);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kMalformedVocabulary, std::string("invalid JSON: ") + e.what());
  }
  if (!root.is_object() || !root.contains("tokens") || !root["tokens"].is_array()) {
    throw Error(ErrorCode::kMalformedVocabulary, "expected {\"tokens\": [...]}");
  }
  std::vector<std::string> tokens;
  tokens.reserve(root["tokens"].size());
  for (const auto& t : root["tokens"]) {
    if (!t.is_string()) throw Error(ErrorCode::kMalformedVocabulary, "tokens must be strings");
    tokens.push_back(t.get<std::string>());
  }
  std::optional<EncoderMode> mode = mode_override;
  if (!mode && root.contains("mode")) {
    const auto name = root["mode"].get<std::string>();
    mode = parse_encoder_mode(name);
    if (!mode) throw Error(ErrorCode::kMalformedVocabulary, "unknown encoder mode " + name);
  }
  if (!mode) throw Error(ErrorCode::kMalformedVocabulary, "no encoder mode given");
  return Vocabulary(std::move(tokens), *mode);
}

Vocabulary load_vocabulary_file(const std::filesystem::path& path,
                                std::optional<EncoderMode> mode_override) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot open vocabulary file " + path.string());
  return load_vocabulary(in, mode_override);
}

std::vector<TokenId> canonical_token_path(const Vocabulary& vocab, std::string_view text,
                                          std::span<const TokenId> left_context) {
  if (text.empty()) return {};
  if (left_context.empty()) return vocab.encode(text);
  const std::string context_text = vocab.decode(left_context);
  auto joint = vocab.try_encode(context_text + std::string(text));
  if (joint && joint->size() >= left_context.size() &&
      std::equal(left_context.begin(), left_context.end(), joint->begin())) {
    return {joint->begin() + static_cast<std::ptrdiff_t>(left_context.size()), joint->end()};
  }
  return vocab.encode(text);
}

}  // namespace dicore
