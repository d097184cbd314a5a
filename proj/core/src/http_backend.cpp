#include "dicore/http_backend.hpp"

#include <algorithm>
#include <cstdlib>
#include <random>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "dicore/error.hpp"

namespace dicore {
namespace {

using nlohmann::json;

bool is_timeout(httplib::Error e) {
  return e == httplib::Error::Read || e == httplib::Error::ConnectionTimeout;
}

bool is_transient_status(int status) { return status == 429 || status >= 500; }

// Releases a semaphore slot on scope exit.
class SlotGuard {
 public:
  explicit SlotGuard(std::counting_semaphore<1024>& s) : s_(s) { s_.acquire(); }
  ~SlotGuard() { s_.release(); }
  SlotGuard(const SlotGuard&) = delete;
  SlotGuard& operator=(const SlotGuard&) = delete;

 private:
  std::counting_semaphore<1024>& s_;
};

}  // namespace

HttpTransport::HttpTransport(HttpEndpoint endpoint)
    : endpoint_(std::move(endpoint)),
      slots_(std::clamp(endpoint_.concurrency, 1, 1024)) {
  if (endpoint_.base_url.empty()) {
    throw Error(ErrorCode::kInvalidConfig, "backend base_url is empty");
  }
  if (endpoint_.retry.max_attempts < 1) {
    throw Error(ErrorCode::kInvalidConfig, "retry max_attempts must be >= 1");
  }
}

std::string HttpTransport::post_json(const std::string& path, const std::string& body) {
  SlotGuard slot(slots_);
  httplib::Headers headers;
  if (!endpoint_.api_key_env.empty()) {
    if (const char* key = std::getenv(endpoint_.api_key_env.c_str()); key && *key) {
      headers.emplace("Authorization", std::string("Bearer ") + key);
    }
  }

  std::mt19937_64 jitter_rng(std::random_device{}());
  std::uniform_real_distribution<double> jitter(0.5, 1.5);
  std::string last_error;
  bool last_timed_out = false;
  for (int attempt = 1; attempt <= endpoint_.retry.max_attempts; ++attempt) {
    if (attempt > 1) {
      ++retries_;
      double delay = static_cast<double>(endpoint_.retry.base_delay.count()) *
                     static_cast<double>(1u << (attempt - 2));
      if (endpoint_.retry.jitter) delay *= jitter(jitter_rng);
      std::this_thread::sleep_for(std::chrono::duration<double, std::milli>(delay));
    }

    httplib::Client client(endpoint_.base_url);
    const auto timeout = endpoint_.timeout;
    client.set_connection_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
    client.set_read_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
    client.set_write_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));

    auto result = client.Post(path, headers, body, "application/json");
    if (!result) {
      last_timed_out = is_timeout(result.error());
      last_error = "transport error: " + httplib::to_string(result.error());
      continue;
    }
    last_timed_out = false;
    if (result->status >= 200 && result->status < 300) return result->body;
    if (result->status == 413) {
      throw Error(ErrorCode::kContextOverflow, "server rejected request as too large");
    }
    last_error = "HTTP " + std::to_string(result->status) + ": " + result->body.substr(0, 200);
    if (!is_transient_status(result->status)) break;
  }
  if (last_timed_out) {
    throw Error(ErrorCode::kTimeout, endpoint_.base_url + path + " timed out");
  }
  throw Error(ErrorCode::kBackendFailure, endpoint_.base_url + path + ": " + last_error);
}

std::string chat_completion_body(const std::string& model, const ChatRequest& request) {
  json body;
  body["model"] = model;
  body["messages"] = json::array();
  for (const auto& m : request.messages) {
    body["messages"].push_back({{"role", std::string(to_string(m.role))}, {"content", m.content}});
  }
  body["temperature"] = request.sampling.temperature;
  body["top_p"] = request.sampling.top_p;
  body["max_tokens"] = request.sampling.max_new_tokens;
  if (request.sampling.seed) body["seed"] = *request.sampling.seed;
  return body.dump();
}

std::string parse_chat_completion(const std::string& body) {
  try {
    const auto root = json::parse(body);
    return root.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kBackendFailure,
                std::string("unexpected chat-completion response: ") + e.what());
  }
}

RemoteChatBackend::RemoteChatBackend(HttpEndpoint endpoint, std::string path)
    : transport_(std::move(endpoint)), path_(std::move(path)) {}

BackendDescriptor RemoteChatBackend::descriptor() const {
  return {BackendKind::kRemoteChat, transport_.endpoint().base_url + path_,
          transport_.endpoint().model, {true, false}};
}

std::string RemoteChatBackend::do_complete_chat(const ChatRequest& request) {
  return parse_chat_completion(
      transport_.post_json(path_, chat_completion_body(transport_.endpoint().model, request)));
}

LocalLogitBackend::LocalLogitBackend(HttpEndpoint endpoint, Vocabulary vocab,
                                     std::string logits_path,
                                     std::optional<std::string> chat_path)
    : transport_(std::move(endpoint)),
      vocab_(std::move(vocab)),
      logits_path_(std::move(logits_path)),
      chat_path_(std::move(chat_path)) {}

BackendDescriptor LocalLogitBackend::descriptor() const {
  return {BackendKind::kLocalLogit, transport_.endpoint().base_url + logits_path_,
          transport_.endpoint().model, {chat_path_.has_value(), true}};
}

std::string LocalLogitBackend::do_complete_chat(const ChatRequest& request) {
  if (!chat_path_) return Backend::do_complete_chat(request);
  return parse_chat_completion(
      transport_.post_json(*chat_path_, chat_completion_body(transport_.endpoint().model, request)));
}

std::vector<double> LocalLogitBackend::do_next_token_logits(const LogitQuery& query) {
  json body;
  body["model"] = transport_.endpoint().model;
  body["prompt"] = std::string(query.prompt);
  body["tokens"] = std::vector<TokenId>(query.emitted.begin(), query.emitted.end());
  const std::string reply = transport_.post_json(logits_path_, body.dump());
  try {
    return json::parse(reply).at("logits").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kBackendFailure, std::string("unexpected logits response: ") + e.what());
  }
}

}  // namespace dicore
