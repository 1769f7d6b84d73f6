// Copyright 2026 The lingeval Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>

#include <chrono>
#include <cstdint>
#include <functional>
#include <mutex>
#include <random>
#include <string>
#include <thread>
#include <utility>

#include <json.hpp>

#include "lingeval/backend.hpp"
#include "lingeval/error.hpp"

namespace lingeval {

struct HttpBackendOptions {
  std::string base_url;  // scheme://host[:port][/prefix]
  std::string api_key;
  std::chrono::seconds timeout{120};
  RetryPolicy retry;
  int max_in_flight = 4;
  uint64_t jitter_seed = 0;
};

/// Splits "https://host:8080/api" into ("https://host:8080", "/api/v1/chat/completions").
/// A prefix already ending in /v1 is not doubled.
inline std::pair<std::string, std::string> split_endpoint(std::string_view base_url) {
  size_t scheme = base_url.find("://");
  if (scheme == std::string_view::npos) throw Error(ErrorCode::ConfigError, "base URL needs a scheme: " + std::string(base_url));
  size_t slash = base_url.find('/', scheme + 3);
  std::string host(base_url.substr(0, slash));
  std::string prefix = slash == std::string_view::npos ? std::string{} : std::string(base_url.substr(slash));
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  if (prefix.size() >= 3 && prefix.compare(prefix.size() - 3, 3, "/v1") == 0) return {host, prefix + "/chat/completions"};
  return {host, prefix + "/v1/chat/completions"};
}

inline std::string chat_request_body(const ChatRequest& request) {
  nlohmann::ordered_json body{
      {"model", request.model_id},
      {"messages",
       nlohmann::ordered_json::array({nlohmann::ordered_json{{"role", "system"}, {"content", request.system_text}},
                                      nlohmann::ordered_json{{"role", "user"}, {"content", request.user_text}}})},
      {"temperature", request.temperature},
      {"max_tokens", request.max_tokens},
  };
  if (request.seed_hint) body["seed"] = *request.seed_hint;
  return body.dump();
}

/// Reads choices[0].message.content and choices[0].finish_reason.
inline ChatCompletion parse_chat_response(std::string_view body) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ProtocolError, std::string("response is not JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("choices") || !doc["choices"].is_array() || doc["choices"].empty())
    throw Error(ErrorCode::ProtocolError, "response has no choices");
  const auto& choice = doc["choices"][0];
  if (!choice.is_object() || !choice.contains("message") || !choice["message"].is_object())
    throw Error(ErrorCode::ProtocolError, "choices[0].message missing");
  const auto& content = choice["message"].value("content", nlohmann::json());
  if (!content.is_string()) throw Error(ErrorCode::ProtocolError, "choices[0].message.content is not a string");
  ChatCompletion completion;
  completion.text = content.get<std::string>();
  if (choice.contains("finish_reason") && choice["finish_reason"].is_string()) {
    std::string reason = choice["finish_reason"].get<std::string>();
    if (reason == "length") completion.finish_reason = FinishReason::Length;
    else if (reason == "error") completion.finish_reason = FinishReason::Error;
  }
  return completion;
}

/// OpenAI-compatible POST /v1/chat/completions client. Retries 429, 5xx and transport
/// failures; 401/403 fail immediately.
class HttpBackend : public ChatBackend {
 public:
  using Sleeper = std::function<void(std::chrono::milliseconds)>;

  explicit HttpBackend(HttpBackendOptions options, Sleeper sleeper = {})
      : ChatBackend(options.max_in_flight), options_(std::move(options)), rng_(options_.jitter_seed) {
    std::tie(host_, path_) = split_endpoint(options_.base_url);
    sleeper_ = sleeper ? std::move(sleeper) : Sleeper([](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); });
  }

 protected:
  ChatCompletion do_complete(const ChatRequest& request) override {
    const std::string body = chat_request_body(request);
    std::vector<std::chrono::milliseconds> waits;
    {
      std::lock_guard lock(rng_mutex_);
      waits = options_.retry.schedule(rng_);
    }
    const auto start = std::chrono::steady_clock::now();
    std::string last_failure = "no attempts made";
    for (int attempt = 1; attempt <= options_.retry.max_attempts; ++attempt) {
      httplib::Client client(host_);
      client.set_connection_timeout(options_.timeout);
      client.set_read_timeout(options_.timeout);
      client.set_write_timeout(options_.timeout);
      httplib::Headers headers;
      if (!options_.api_key.empty()) headers.emplace("Authorization", "Bearer " + options_.api_key);
      auto result = client.Post(path_, headers, body, "application/json");
      if (result) {
        const int status = result->status;
        if (status == 200) {
          ChatCompletion completion = parse_chat_response(result->body);
          completion.attempt_count = attempt;
          completion.latency_ms =
              std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
          return completion;
        }
        if (status == 401 || status == 403)
          throw Error(ErrorCode::AuthError, "HTTP " + std::to_string(status) + " from " + host_);
        if (status != 429 && status < 500)
          throw Error(ErrorCode::ProtocolError, "HTTP " + std::to_string(status) + ": " + result->body.substr(0, 200));
        last_failure = "HTTP " + std::to_string(status);
      } else {
        last_failure = httplib::to_string(result.error());
      }
      if (attempt < options_.retry.max_attempts) sleeper_(waits[static_cast<size_t>(attempt - 1)]);
    }
    throw Error(ErrorCode::ExhaustedRetries,
                std::to_string(options_.retry.max_attempts) + " attempts failed; last: " + last_failure);
  }

 private:
  HttpBackendOptions options_;
  std::string host_;
  std::string path_;
  Sleeper sleeper_;
  std::mutex rng_mutex_;
  std::mt19937_64 rng_;
};

}  // namespace lingeval
