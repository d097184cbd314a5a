#include "dicore/backend.hpp"

#include <random>

#include "dicore/error.hpp"

namespace dicore {

std::string_view to_string(Role role) {
  switch (role) {
    case Role::kSystem: return "system";
    case Role::kUser: return "user";
    case Role::kAssistant: return "assistant";
  }
  return "user";
}

std::string_view to_string(BackendKind kind) {
  switch (kind) {
    case BackendKind::kRemoteChat: return "remote_chat";
    case BackendKind::kLocalLogit: return "local_logit";
    case BackendKind::kScripted: return "scripted";
  }
  return "unknown";
}

void ChatRequest::validate() const {
  bool has_user = false;
  for (const auto& m : messages) has_user = has_user || m.role == Role::kUser;
  if (!has_user) throw Error(ErrorCode::kInvalidArgument, "chat request has no user message");
  sampling.validate();
}

std::string ChatRequest::joined_content() const {
  std::string out;
  for (const auto& m : messages) {
    if (!out.empty()) out += '\n';
    out += m.content;
  }
  return out;
}

std::string Backend::complete_chat(const ChatRequest& request) {
  if (!descriptor().capabilities.chat) {
    throw Error(ErrorCode::kCapabilityMismatch, "backend does not support chat completion");
  }
  request.validate();
  return do_complete_chat(request);
}

std::vector<double> Backend::next_token_logits(const LogitQuery& query) {
  if (!descriptor().capabilities.logits) {
    throw Error(ErrorCode::kCapabilityMismatch, "backend does not expose next-token logits");
  }
  auto logits = do_next_token_logits(query);
  if (logits.size() != vocab_size()) {
    throw Error(ErrorCode::kBackendFailure,
                "backend returned " + std::to_string(logits.size()) + " logits for a vocabulary of " +
                    std::to_string(vocab_size()));
  }
  return logits;
}

std::string Backend::do_complete_chat(const ChatRequest&) {
  throw Error(ErrorCode::kCapabilityMismatch, "backend does not support chat completion");
}

std::vector<double> Backend::do_next_token_logits(const LogitQuery&) {
  throw Error(ErrorCode::kCapabilityMismatch, "backend does not expose next-token logits");
}

BackendDescriptor UniformLogitBackend::descriptor() const {
  return {BackendKind::kScripted, "", "uniform", {false, true}};
}

std::vector<double> UniformLogitBackend::do_next_token_logits(const LogitQuery&) {
  return std::vector<double>(vocab_size_, 0.0);
}

BackendDescriptor RandomLogitBackend::descriptor() const {
  return {BackendKind::kScripted, "", "random:" + std::to_string(seed_), {false, true}};
}

std::vector<double> RandomLogitBackend::do_next_token_logits(const LogitQuery& query) {
  std::uint64_t h = fnv1a64(query.prompt, seed_ ^ 0x9e3779b97f4a7c15ULL);
  h = fnv1a64(std::string_view(reinterpret_cast<const char*>(query.emitted.data()),
                               query.emitted.size_bytes()),
              h);
  std::mt19937_64 rng(h);
  std::normal_distribution<double> normal(0.0, scale_);
  std::vector<double> logits(vocab_size_);
  for (auto& v : logits) v = normal(rng);
  return logits;
}

std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (const char c : data) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace dicore
