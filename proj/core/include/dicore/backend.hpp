#pragma once

// Text-generation backends in two capability tiers: chat completion (Dreamer,
// Judge, baselines) and next-token logits (FSM-guided Grounder).

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dicore/automaton.hpp"
#include "dicore/sampling.hpp"

namespace dicore {

enum class Role { kSystem, kUser, kAssistant };

std::string_view to_string(Role role);

struct ChatMessage {
  Role role = Role::kUser;
  std::string content;
};

struct ChatRequest {
  std::vector<ChatMessage> messages;
  SamplingParams sampling;

  /// Throws INVALID_ARGUMENT without a user message or with invalid sampling.
  void validate() const;
  /// Concatenated message contents, used for fixture matching.
  std::string joined_content() const;
};

enum class BackendKind { kRemoteChat, kLocalLogit, kScripted };

std::string_view to_string(BackendKind kind);

struct Capabilities {
  bool chat = false;
  bool logits = false;
};

struct BackendDescriptor {
  BackendKind kind = BackendKind::kScripted;
  std::string endpoint;
  std::string model;
  Capabilities capabilities;
};

/// What the decode loop hands a logit backend at each step. The prompt is
/// passed as text so the backend tokenizes it with its own tokenizer; the
/// emitted continuation is already in vocabulary ids. `state` is the automaton
/// tag of the current decoding position (informational; scripted backends key
/// on it).
struct LogitQuery {
  std::string_view prompt;
  std::span<const TokenId> emitted;
  StateTag state = StateTag::kPreamble;
};

/// Backends must accept concurrent calls.
class Backend {
 public:
  virtual ~Backend() = default;

  virtual BackendDescriptor descriptor() const = 0;

  /// Validates the request and capability, then delegates.
  /// Throws CAPABILITY_MISMATCH, BACKEND_FAILURE or TIMEOUT.
  std::string complete_chat(const ChatRequest& request);

  /// Unnormalized scores for every vocabulary entry; the result always has
  /// vocab_size() entries. Throws CAPABILITY_MISMATCH, BACKEND_FAILURE or
  /// CONTEXT_OVERFLOW.
  std::vector<double> next_token_logits(const LogitQuery& query);

  /// Size of the logit vocabulary; 0 for chat-only backends.
  virtual std::size_t vocab_size() const { return 0; }

 protected:
  virtual std::string do_complete_chat(const ChatRequest& request);
  virtual std::vector<double> do_next_token_logits(const LogitQuery& query);
};

/// Logit backend that scores every token 0.
class UniformLogitBackend final : public Backend {
 public:
  explicit UniformLogitBackend(std::size_t vocab_size) : vocab_size_(vocab_size) {}
  BackendDescriptor descriptor() const override;
  std::size_t vocab_size() const override { return vocab_size_; }

 protected:
  std::vector<double> do_next_token_logits(const LogitQuery& query) override;

 private:
  std::size_t vocab_size_;
};

/// Logit backend drawing N(0, scale^2) scores from a generator seeded by
/// (seed, prompt, emitted tokens): identical queries give identical vectors.
class RandomLogitBackend final : public Backend {
 public:
  RandomLogitBackend(std::size_t vocab_size, std::uint64_t seed, double scale = 3.0)
      : vocab_size_(vocab_size), seed_(seed), scale_(scale) {}
  BackendDescriptor descriptor() const override;
  std::size_t vocab_size() const override { return vocab_size_; }

 protected:
  std::vector<double> do_next_token_logits(const LogitQuery& query) override;

 private:
  std::size_t vocab_size_;
  std::uint64_t seed_;
  double scale_;
};

/// 64-bit FNV-1a; used to derive per-query and per-document seeds.
std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = 0xcbf29ce484222325ULL);

}  // namespace dicore
