// Copyright 2026 The lingeval Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <json.hpp>

#include "lingeval/error.hpp"
#include "lingeval/prompt.hpp"

namespace lingeval {

struct ChatRequest {
  std::string model_id;
  std::string system_text;
  std::string user_text;
  double temperature = kDefaultTemperature;
  int max_tokens = kShortMaxTokens;
  std::optional<int64_t> seed_hint;

  void validate() const {
    if (max_tokens < 1) throw Error(ErrorCode::InvalidArgument, "max_tokens must be >= 1");
    if (!(temperature >= 0.0)) throw Error(ErrorCode::InvalidArgument, "temperature must be >= 0");
  }

  std::string fingerprint() const { return prompt_fingerprint(system_text, user_text, temperature, max_tokens); }
};

enum class FinishReason { Stop, Length, Error };

inline std::string_view to_string(FinishReason r) {
  switch (r) {
    case FinishReason::Stop: return "stop";
    case FinishReason::Length: return "length";
    case FinishReason::Error: return "error";
  }
  return "error";
}

inline std::optional<FinishReason> parse_finish_reason(std::string_view s) {
  if (s == "stop") return FinishReason::Stop;
  if (s == "length") return FinishReason::Length;
  if (s == "error") return FinishReason::Error;
  return std::nullopt;
}

struct ChatCompletion {
  std::string text;
  FinishReason finish_reason = FinishReason::Stop;
  int64_t latency_ms = 0;
  int attempt_count = 1;
};

/// Exponential backoff with multiplicative jitter. Delays never decrease across attempts.
struct RetryPolicy {
  int max_attempts = 5;
  std::chrono::milliseconds base_delay{1000};
  double factor = 2.0;
  double jitter = 0.2;  // +/- fraction of the nominal delay
  std::chrono::milliseconds max_delay{60000};

  /// Delay before retry number `retry` (1-based), given u uniform in [-1, 1].
  std::chrono::milliseconds nominal(int retry, double u) const {
    double ms = static_cast<double>(base_delay.count()) * std::pow(factor, retry - 1) * (1.0 + jitter * u);
    ms = std::clamp(ms, 0.0, static_cast<double>(max_delay.count()));
    return std::chrono::milliseconds(static_cast<int64_t>(ms));
  }

  /// All waits for one request: max_attempts - 1 entries.
  std::vector<std::chrono::milliseconds> schedule(std::mt19937_64& rng) const {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<std::chrono::milliseconds> out;
    std::chrono::milliseconds previous{0};
    for (int retry = 1; retry < max_attempts; ++retry) {
      previous = std::max(previous, nominal(retry, dist(rng)));
      out.push_back(previous);
    }
    return out;
  }
};

/// Caps concurrent requests per backend.
class InFlightLimiter {
 public:
  explicit InFlightLimiter(int limit) : limit_(std::max(1, limit)) {}

  void acquire() {
    std::unique_lock lock(mutex_);
    cv_.wait(lock, [this] { return in_flight_ < limit_; });
    ++in_flight_;
    peak_ = std::max(peak_, in_flight_);
  }

  void release() {
    {
      std::lock_guard lock(mutex_);
      --in_flight_;
    }
    cv_.notify_one();
  }

  int limit() const noexcept { return limit_; }
  int peak() const {
    std::lock_guard lock(mutex_);
    return peak_;
  }

 private:
  int limit_;
  int in_flight_ = 0;
  int peak_ = 0;
  mutable std::mutex mutex_;
  std::condition_variable cv_;
};

/// Chat-completion contract. complete() is safe to call from many threads; at most
/// max_in_flight requests run concurrently.
class ChatBackend {
 public:
  explicit ChatBackend(int max_in_flight = 4) : limiter_(max_in_flight) {}
  virtual ~ChatBackend() = default;
  ChatBackend(const ChatBackend&) = delete;
  ChatBackend& operator=(const ChatBackend&) = delete;

  ChatCompletion complete(const ChatRequest& request) {
    request.validate();
    limiter_.acquire();
    struct Release {
      InFlightLimiter& l;
      ~Release() { l.release(); }
    } release{limiter_};
    calls_.fetch_add(1, std::memory_order_relaxed);
    return do_complete(request);
  }

  uint64_t call_count() const noexcept { return calls_.load(std::memory_order_relaxed); }
  int peak_in_flight() const { return limiter_.peak(); }
  int max_in_flight() const noexcept { return limiter_.limit(); }

 protected:
  virtual ChatCompletion do_complete(const ChatRequest& request) = 0;

 private:
  InFlightLimiter limiter_;
  std::atomic<uint64_t> calls_{0};
};

// ---------------------------------------------------------------------------
// Mock backend
// ---------------------------------------------------------------------------

/// A rule matches when every field it sets matches; the first matching rule answers.
struct MockRule {
  std::optional<std::string> fingerprint_prefix;
  std::optional<std::string> contains;  // substring of the user text
  std::optional<std::string> model;
  std::string response;
  FinishReason finish_reason = FinishReason::Stop;
  std::optional<ErrorCode> fail_with;

  bool matches(const ChatRequest& request, const std::string& fingerprint) const {
    if (fingerprint_prefix && fingerprint.rfind(*fingerprint_prefix, 0) != 0) return false;
    if (contains && request.user_text.find(*contains) == std::string::npos) return false;
    if (model && request.model_id != *model) return false;
    return true;
  }
};

struct MockScript {
  std::vector<MockRule> rules;

  /// {"rules": [{"fingerprint_prefix"?, "contains"?, "model"?, "response", "finish_reason"?, "fail"?}]}
  static MockScript from_json(const nlohmann::json& doc) {
    MockScript script;
    if (!doc.is_object() || !doc.contains("rules") || !doc["rules"].is_array())
      throw Error(ErrorCode::ConfigError, "mock script must be an object with a 'rules' array");
    for (const auto& r : doc["rules"]) {
      MockRule rule;
      if (r.contains("fingerprint_prefix")) rule.fingerprint_prefix = r["fingerprint_prefix"].get<std::string>();
      if (r.contains("contains")) rule.contains = r["contains"].get<std::string>();
      if (r.contains("model")) rule.model = r["model"].get<std::string>();
      rule.response = r.value("response", std::string{});
      if (r.contains("finish_reason")) {
        auto reason = parse_finish_reason(r["finish_reason"].get<std::string>());
        if (!reason) throw Error(ErrorCode::ConfigError, "mock rule has unknown finish_reason");
        rule.finish_reason = *reason;
      }
      if (r.value("fail", false)) rule.fail_with = ErrorCode::ProtocolError;
      script.rules.push_back(std::move(rule));
    }
    return script;
  }
};

/// Deterministic: identical requests give byte-identical completions. Unscripted requests
/// answer "MOCK:" plus the first 12 hex digits of the prompt fingerprint.
inline ChatCompletion mock_complete(const MockScript& script, const ChatRequest& request) {
  std::string fingerprint = request.fingerprint();
  for (const MockRule& rule : script.rules) {
    if (!rule.matches(request, fingerprint)) continue;
    if (rule.fail_with) throw Error(*rule.fail_with, "scripted mock failure");
    return ChatCompletion{rule.response, rule.finish_reason, 0, 1};
  }
  return ChatCompletion{"MOCK:" + fingerprint.substr(0, 12), FinishReason::Stop, 0, 1};
}

class MockBackend : public ChatBackend {
 public:
  explicit MockBackend(MockScript script = {}, int max_in_flight = 8,
                       std::chrono::milliseconds simulated_latency = std::chrono::milliseconds(0))
      : ChatBackend(max_in_flight), script_(std::move(script)), latency_(simulated_latency) {}

 protected:
  ChatCompletion do_complete(const ChatRequest& request) override {
    if (latency_.count() > 0) std::this_thread::sleep_for(latency_);
    return mock_complete(script_, request);
  }

 private:
  MockScript script_;
  std::chrono::milliseconds latency_;
};

}  // namespace lingeval
