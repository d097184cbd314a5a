#include <gtest/gtest.h>

#include <atomic>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "dicore/error.hpp"
#include "dicore/http_backend.hpp"

using namespace dicore;

namespace {

/// Local server on an ephemeral port, stopped on destruction.
class TestServer {
 public:
  TestServer() {
    port_ = server.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  ~TestServer() {
    server.stop();
    thread_.join();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

  httplib::Server server;

 private:
  int port_ = 0;
  std::thread thread_;
};

HttpEndpoint fast(const std::string& url) {
  HttpEndpoint ep;
  ep.base_url = url;
  ep.model = "test-model";
  ep.api_key_env = "DICORE_TEST_API_KEY";
  ep.timeout = std::chrono::milliseconds(500);
  ep.retry.base_delay = std::chrono::milliseconds(1);
  ep.retry.max_attempts = 3;
  return ep;
}

ChatRequest ask(const std::string& content) {
  ChatRequest r;
  r.messages.push_back({Role::kUser, content});
  r.sampling.max_new_tokens = 4;
  r.sampling.seed = 7;
  return r;
}

std::string completion(const std::string& content) {
  return nlohmann::json{{"choices", {{{"message", {{"role", "assistant"}, {"content", content}}}}}}}
      .dump();
}

}  // namespace

TEST(RemoteChat, RetriesServerErrorsThenSucceeds) {
  TestServer s;
  std::atomic<int> calls{0};
  std::string body_seen, auth_seen;
  s.server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
    if (++calls < 3) {
      res.status = calls == 1 ? 503 : 429;
      return;
    }
    body_seen = req.body;
    auth_seen = req.get_header_value("Authorization");
    res.set_content(completion("Yes"), "application/json");
  });
  ::setenv("DICORE_TEST_API_KEY", "sekret", 1);
  RemoteChatBackend backend(fast(s.url()));
  EXPECT_EQ(backend.complete_chat(ask("hello")), "Yes");
  EXPECT_EQ(calls.load(), 3);
  EXPECT_EQ(backend.retries(), 2u);
  EXPECT_EQ(auth_seen, "Bearer sekret");
  const auto body = nlohmann::json::parse(body_seen);
  EXPECT_EQ(body["model"], "test-model");
  EXPECT_EQ(body["messages"][0]["content"], "hello");
  EXPECT_DOUBLE_EQ(body["temperature"].get<double>(), 0.4);
  EXPECT_DOUBLE_EQ(body["top_p"].get<double>(), 0.9);
  EXPECT_EQ(body["max_tokens"], 4);
  ::unsetenv("DICORE_TEST_API_KEY");
}

TEST(RemoteChat, GivesUpAfterMaxAttempts) {
  TestServer s;
  std::atomic<int> calls{0};
  s.server.Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
    ++calls;
    res.status = 500;
  });
  RemoteChatBackend backend(fast(s.url()));
  try {
    backend.complete_chat(ask("x"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBackendFailure);
  }
  EXPECT_EQ(calls.load(), 3);
}

TEST(RemoteChat, ClientErrorsAreNotRetried) {
  TestServer s;
  std::atomic<int> calls{0};
  s.server.Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
    ++calls;
    res.status = 413;
  });
  RemoteChatBackend backend(fast(s.url()));
  try {
    backend.complete_chat(ask("x"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kContextOverflow);
  }
  EXPECT_EQ(calls.load(), 1);
}

TEST(RemoteChat, TimeoutSurfaces) {
  TestServer s;
  s.server.Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
    std::this_thread::sleep_for(std::chrono::milliseconds(400));
    res.set_content(completion("late"), "application/json");
  });
  auto ep = fast(s.url());
  ep.timeout = std::chrono::milliseconds(100);
  ep.retry.max_attempts = 1;
  RemoteChatBackend backend(ep);
  try {
    backend.complete_chat(ask("x"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTimeout);
  }
}

TEST(RemoteChat, IsChatOnly) {
  RemoteChatBackend backend(fast("http://127.0.0.1:9"));
  EXPECT_TRUE(backend.descriptor().capabilities.chat);
  EXPECT_FALSE(backend.descriptor().capabilities.logits);
  try {
    backend.next_token_logits({"p", {}, StateTag::kPreamble});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kCapabilityMismatch);
  }
}

TEST(ChatCompletion, ParsesAndRejects) {
  EXPECT_EQ(parse_chat_completion(completion("No")), "No");
  EXPECT_THROW(parse_chat_completion("{}"), Error);
  EXPECT_THROW(parse_chat_completion("not json"), Error);
}

TEST(LocalLogit, PostsPromptAndTokens) {
  TestServer s;
  const Vocabulary v({"a", "b", "c"}, EncoderMode::kChar);
  nlohmann::json seen;
  s.server.Post("/logits", [&](const httplib::Request& req, httplib::Response& res) {
    seen = nlohmann::json::parse(req.body);
    res.set_content(R"({"logits":[0.5,1.5,-2.0]})", "application/json");
  });
  LocalLogitBackend backend(fast(s.url()), v);
  const std::vector<TokenId> emitted{2, 0};
  const auto logits = backend.next_token_logits({"the prompt", emitted, StateTag::kInterior});
  EXPECT_EQ(logits, (std::vector<double>{0.5, 1.5, -2.0}));
  EXPECT_EQ(seen["prompt"], "the prompt");
  EXPECT_EQ(seen["tokens"], nlohmann::json::array({2, 0}));
  EXPECT_FALSE(backend.descriptor().capabilities.chat);
}

TEST(LocalLogit, WrongLengthIsBackendFailure) {
  TestServer s;
  s.server.Post("/logits", [&](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"logits":[0.5]})", "application/json");
  });
  LocalLogitBackend backend(fast(s.url()), Vocabulary({"a", "b"}, EncoderMode::kChar));
  try {
    backend.next_token_logits({"p", {}, StateTag::kPreamble});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBackendFailure);
  }
}
