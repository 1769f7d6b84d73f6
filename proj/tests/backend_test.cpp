// Copyright 2026 The lingeval Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <thread>

#include <httplib.h>

#include "lingeval/backend.hpp"
#include "lingeval/http_backend.hpp"
#include "lingeval/prompt.hpp"
#include "test_support.hpp"

namespace lingeval {
namespace {

using testing::error_code_of;

ChatRequest rapa_nui_request() {
  RenderedPrompt p = render_baseline(EvalSetting::make(Regime::FewShot), testing::rapa_nui());
  return ChatRequest{"mock-model", p.system_text, p.user_text, 0.0, 512, std::nullopt};
}

TEST(MockBackend, ScriptedFingerprint) {
  ChatRequest req = rapa_nui_request();
  MockScript script = MockScript::from_json(nlohmann::json::parse(
      R"({"rules":[{"fingerprint_prefix":")" + req.fingerprint().substr(0, 16) + R"(","response":"**[ŋau manu koe]**"}]})"));
  MockBackend backend(script);
  EXPECT_EQ(backend.complete(req).text, "**[ŋau manu koe]**");
  ChatRequest other = req;
  other.temperature = 0.5;
  EXPECT_EQ(backend.complete(other).text, "MOCK:" + other.fingerprint().substr(0, 12));
  EXPECT_EQ(backend.call_count(), 2u);
}

TEST(MockBackend, FallbackAndDeterminism) {
  MockBackend a, b;
  ChatRequest req = rapa_nui_request();
  ChatCompletion x = a.complete(req), y = a.complete(req), z = b.complete(req);
  EXPECT_EQ(x.text, "MOCK:" + req.fingerprint().substr(0, 12));
  EXPECT_EQ(x.text, y.text);
  EXPECT_EQ(x.text, z.text);
  EXPECT_EQ(x.finish_reason, FinishReason::Stop);
  EXPECT_EQ(x.attempt_count, 1);
}

TEST(MockBackend, RuleFields) {
  MockScript script = MockScript::from_json(nlohmann::json::parse(R"({"rules":[
    {"contains":"The bird bites you.","model":"m1","response":"one"},
    {"contains":"The bird bites you.","response":"cut","finish_reason":"length"},
    {"contains":"explode","fail":true}]})"));
  MockBackend backend(script);
  ChatRequest req = rapa_nui_request();
  req.model_id = "m1";
  EXPECT_EQ(backend.complete(req).text, "one");
  req.model_id = "m2";
  ChatCompletion c = backend.complete(req);
  EXPECT_EQ(c.text, "cut");
  EXPECT_EQ(c.finish_reason, FinishReason::Length);
  req.user_text = "please explode";
  EXPECT_EQ(error_code_of([&] { backend.complete(req); }), ErrorCode::ProtocolError);
  EXPECT_EQ(error_code_of([] { MockScript::from_json(nlohmann::json::parse("[]")); }), ErrorCode::ConfigError);
}

TEST(ChatBackend, RejectsInvalidRequests) {
  MockBackend backend;
  ChatRequest req = rapa_nui_request();
  req.max_tokens = 0;
  EXPECT_EQ(error_code_of([&] { backend.complete(req); }), ErrorCode::InvalidArgument);
  req.max_tokens = 1;
  req.temperature = -1;
  EXPECT_EQ(error_code_of([&] { backend.complete(req); }), ErrorCode::InvalidArgument);
}

TEST(RetryPolicy, ScheduleIsMonotoneAndBounded) {
  RetryPolicy policy;
  for (uint64_t seed = 0; seed < 200; ++seed) {
    std::mt19937_64 rng(seed);
    auto waits = policy.schedule(rng);
    ASSERT_EQ(waits.size(), 4u);
    for (size_t i = 0; i < waits.size(); ++i) {
      double nominal = 1000.0 * std::pow(2.0, static_cast<double>(i));
      EXPECT_GE(waits[i].count(), static_cast<int64_t>(nominal * 0.8) - 1);
      if (i > 0) {
        EXPECT_GE(waits[i], waits[i - 1]);
      }
    }
    EXPECT_LE(waits[0].count(), 1200);
  }
  RetryPolicy flat{5, std::chrono::milliseconds(100), 1.0, 0.5, std::chrono::milliseconds(1000)};
  std::mt19937_64 rng(1);
  auto waits = flat.schedule(rng);
  for (size_t i = 1; i < waits.size(); ++i) EXPECT_GE(waits[i], waits[i - 1]);
}

/// Counts concurrent calls to check the in-flight cap.
class SlowBackend : public ChatBackend {
 public:
  explicit SlowBackend(int limit) : ChatBackend(limit) {}
  std::atomic<int> now{0}, peak{0};

 protected:
  ChatCompletion do_complete(const ChatRequest&) override {
    int n = ++now;
    int p = peak.load();
    while (n > p && !peak.compare_exchange_weak(p, n)) {
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
    --now;
    return ChatCompletion{"ok", FinishReason::Stop, 5, 1};
  }
};

TEST(ChatBackend, ConcurrencyBound) {
  SlowBackend backend(3);
  ChatRequest req = rapa_nui_request();
  std::vector<std::thread> threads;
  for (int t = 0; t < 12; ++t)
    threads.emplace_back([&] {
      for (int i = 0; i < 5; ++i) backend.complete(req);
    });
  for (auto& t : threads) t.join();
  EXPECT_EQ(backend.call_count(), 60u);
  EXPECT_LE(backend.peak.load(), 3);
  EXPECT_LE(backend.peak_in_flight(), 3);
  EXPECT_GE(backend.peak.load(), 2);
}

TEST(Http, SplitEndpoint) {
  EXPECT_EQ(split_endpoint("http://127.0.0.1:8080"),
            (std::pair<std::string, std::string>{"http://127.0.0.1:8080", "/v1/chat/completions"}));
  EXPECT_EQ(split_endpoint("https://api.example.com/v1/"),
            (std::pair<std::string, std::string>{"https://api.example.com", "/v1/chat/completions"}));
  EXPECT_EQ(split_endpoint("https://host/proxy").second, "/proxy/v1/chat/completions");
  EXPECT_EQ(error_code_of([] { split_endpoint("localhost:80"); }), ErrorCode::ConfigError);
}

TEST(Http, RequestBody) {
  ChatRequest req{"m", "sys", "usr", 0.0, 512, 42};
  auto body = nlohmann::json::parse(chat_request_body(req));
  EXPECT_EQ(body["model"], "m");
  EXPECT_EQ(body["messages"][0]["role"], "system");
  EXPECT_EQ(body["messages"][1]["content"], "usr");
  EXPECT_EQ(body["max_tokens"], 512);
  EXPECT_EQ(body["seed"], 42);
  req.seed_hint.reset();
  EXPECT_FALSE(nlohmann::json::parse(chat_request_body(req)).contains("seed"));
}

TEST(Http, ParseResponse) {
  auto c = parse_chat_response(R"({"choices":[{"message":{"content":"**[x]**"},"finish_reason":"length"}]})");
  EXPECT_EQ(c.text, "**[x]**");
  EXPECT_EQ(c.finish_reason, FinishReason::Length);
  EXPECT_EQ(parse_chat_response(R"({"choices":[{"message":{"content":"y"},"finish_reason":"stop"}]})").finish_reason,
            FinishReason::Stop);
  for (const char* bad : {"not json", "{}", R"({"choices":[]})", R"({"choices":[{"message":{}}]})",
                          R"({"choices":[{"message":{"content":7}}]})"})
    EXPECT_EQ(error_code_of([&] { parse_chat_response(bad); }), ErrorCode::ProtocolError) << bad;
}

/// Localhost server replaying a list of (status, body) responses.
class FakeServer {
 public:
  explicit FakeServer(std::vector<std::pair<int, std::string>> script) : script_(std::move(script)) {
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      std::lock_guard lock(mutex_);
      last_auth_ = req.get_header_value("Authorization");
      last_body_ = req.body;
      auto [status, body] = script_[std::min(hits_, script_.size() - 1)];
      ++hits_;
      res.status = status;
      res.set_content(body, "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeServer() {
    server_.stop();
    thread_.join();
  }

  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }
  size_t hits() {
    std::lock_guard lock(mutex_);
    return hits_;
  }
  std::string last_auth() {
    std::lock_guard lock(mutex_);
    return last_auth_;
  }
  std::string last_body() {
    std::lock_guard lock(mutex_);
    return last_body_;
  }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::mutex mutex_;
  size_t hits_ = 0;
  std::string last_auth_, last_body_;
  std::vector<std::pair<int, std::string>> script_;
};

const std::string kOk = R"({"choices":[{"message":{"content":"**[ŋau manu koe]**"},"finish_reason":"stop"}]})";

struct Sleeps {
  std::vector<std::chrono::milliseconds> waits;
  HttpBackend::Sleeper sleeper() {
    return [this](std::chrono::milliseconds d) { waits.push_back(d); };
  }
};

HttpBackendOptions options_for(const FakeServer& s) {
  HttpBackendOptions o;
  o.base_url = s.url();
  o.api_key = "test-key";
  o.timeout = std::chrono::seconds(5);
  return o;
}

TEST(Http, RetriesRateLimitThenSucceeds) {
  FakeServer server({{429, "{}"}, {429, "{}"}, {200, kOk}});
  Sleeps sleeps;
  HttpBackend backend(options_for(server), sleeps.sleeper());
  ChatCompletion c = backend.complete(rapa_nui_request());
  EXPECT_EQ(c.text, "**[ŋau manu koe]**");
  EXPECT_EQ(c.attempt_count, 3);
  EXPECT_EQ(server.hits(), 3u);
  ASSERT_EQ(sleeps.waits.size(), 2u);
  EXPECT_LE(sleeps.waits[0], sleeps.waits[1]);
  EXPECT_GE(sleeps.waits[0].count(), 800);
  EXPECT_EQ(server.last_auth(), "Bearer test-key");
  EXPECT_EQ(nlohmann::json::parse(server.last_body())["model"], "mock-model");
}

TEST(Http, ServerErrorsExhaustRetries) {
  FakeServer server({{503, "{}"}});
  Sleeps sleeps;
  HttpBackend backend(options_for(server), sleeps.sleeper());
  EXPECT_EQ(error_code_of([&] { backend.complete(rapa_nui_request()); }), ErrorCode::ExhaustedRetries);
  EXPECT_EQ(server.hits(), 5u);
  EXPECT_EQ(sleeps.waits.size(), 4u);
}

TEST(Http, AuthFailsImmediately) {
  FakeServer server({{401, "{}"}});
  Sleeps sleeps;
  HttpBackend backend(options_for(server), sleeps.sleeper());
  EXPECT_EQ(error_code_of([&] { backend.complete(rapa_nui_request()); }), ErrorCode::AuthError);
  EXPECT_EQ(server.hits(), 1u);
  EXPECT_TRUE(sleeps.waits.empty());
}

TEST(Http, TruncationAndMalformedBodies) {
  {
    FakeServer server({{200, R"({"choices":[{"message":{"content":"partial"},"finish_reason":"length"}]})"}});
    HttpBackend backend(options_for(server), [](std::chrono::milliseconds) {});
    EXPECT_EQ(backend.complete(rapa_nui_request()).finish_reason, FinishReason::Length);
  }
  {
    FakeServer server({{200, "<html>oops</html>"}});
    Sleeps sleeps;
    HttpBackend backend(options_for(server), sleeps.sleeper());
    EXPECT_EQ(error_code_of([&] { backend.complete(rapa_nui_request()); }), ErrorCode::ProtocolError);
  }
  {
    FakeServer server({{400, R"({"error":"bad"})"}});
    HttpBackend backend(options_for(server), [](std::chrono::milliseconds) {});
    EXPECT_EQ(error_code_of([&] { backend.complete(rapa_nui_request()); }), ErrorCode::ProtocolError);
    EXPECT_EQ(server.hits(), 1u);
  }
}

TEST(Http, UnreachableHostExhaustsRetries) {
  int port;
  {
    httplib::Server probe;
    port = probe.bind_to_any_port("127.0.0.1");
  }
  HttpBackendOptions o;
  o.base_url = "http://127.0.0.1:" + std::to_string(port);
  o.timeout = std::chrono::seconds(1);
  o.retry.max_attempts = 2;
  Sleeps sleeps;
  HttpBackend backend(o, sleeps.sleeper());
  EXPECT_EQ(error_code_of([&] { backend.complete(rapa_nui_request()); }), ErrorCode::ExhaustedRetries);
  EXPECT_EQ(sleeps.waits.size(), 1u);
}

}  // namespace
}  // namespace lingeval
