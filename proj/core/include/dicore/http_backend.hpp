#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <semaphore>
#include <string>

#include "dicore/backend.hpp"
#include "dicore/vocabulary.hpp"

namespace dicore {

struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds base_delay{1000};  ///< doubled after every failed attempt
  bool jitter = true;                          ///< scale each delay by U(0.5, 1.5)
};

struct HttpEndpoint {
  std::string base_url;  ///< scheme://host[:port]
  std::string model;
  /// Bearer token is read from this environment variable when set and non-empty.
  std::string api_key_env = "DICORE_API_KEY";
  std::chrono::milliseconds timeout{60'000};
  int concurrency = 4;  ///< bound on in-flight requests
  RetryPolicy retry;
};

/// Shared request machinery: bounded concurrency, timeouts and retry with
/// exponential backoff on transport errors, HTTP 429 and 5xx.
class HttpTransport {
 public:
  explicit HttpTransport(HttpEndpoint endpoint);

  /// POSTs a JSON body and returns the response body. Throws TIMEOUT when the
  /// last attempt timed out, CONTEXT_OVERFLOW on HTTP 413, BACKEND_FAILURE
  /// otherwise.
  std::string post_json(const std::string& path, const std::string& body);

  const HttpEndpoint& endpoint() const { return endpoint_; }
  /// Total retries performed (attempts beyond the first) over this transport's lifetime.
  std::uint64_t retries() const { return retries_.load(); }

 private:
  HttpEndpoint endpoint_;
  std::counting_semaphore<1024> slots_;
  std::atomic<std::uint64_t> retries_{0};
};

/// Chat-completions client: POSTs {"model", "messages", "temperature",
/// "top_p", "max_tokens", "seed"?} and reads choices[0].message.content.
/// Declared chat-only: hosted APIs do not expose full logits.
class RemoteChatBackend final : public Backend {
 public:
  explicit RemoteChatBackend(HttpEndpoint endpoint,
                             std::string path = "/v1/chat/completions");

  BackendDescriptor descriptor() const override;
  std::uint64_t retries() const { return transport_.retries(); }

 protected:
  std::string do_complete_chat(const ChatRequest& request) override;

 private:
  HttpTransport transport_;
  std::string path_;
};

/// Client for a local inference server exposing raw logits:
///   POST <logits_path> {"model", "prompt": str, "tokens": [int]} -> {"logits": [float]}
/// Optionally also serves chat completions on `chat_path`.
class LocalLogitBackend final : public Backend {
 public:
  LocalLogitBackend(HttpEndpoint endpoint, Vocabulary vocab, std::string logits_path = "/logits",
                    std::optional<std::string> chat_path = std::nullopt);

  BackendDescriptor descriptor() const override;
  std::size_t vocab_size() const override { return vocab_.size(); }
  std::uint64_t retries() const { return transport_.retries(); }

 protected:
  std::string do_complete_chat(const ChatRequest& request) override;
  std::vector<double> do_next_token_logits(const LogitQuery& query) override;

 private:
  HttpTransport transport_;
  Vocabulary vocab_;
  std::string logits_path_;
  std::optional<std::string> chat_path_;
};

/// Chat-completions request body for `request` (exposed for tests).
std::string chat_completion_body(const std::string& model, const ChatRequest& request);
/// Extracts choices[0].message.content. Throws BACKEND_FAILURE.
std::string parse_chat_completion(const std::string& body);

}  // namespace dicore
