/*
 * Copyright 2026 The judgebench Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// OpenAI-compatible chat-completion client.
//
// Request:  POST <base>/chat/completions
//           {"model", "messages": [{"role": "user", "content": prompt}],
//            "temperature", "max_tokens", optional "seed"}
// Response: choices[0].message.content

#pragma once

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "httplib.h"
#include "judgebench/domain.hpp"

namespace judgebench {

struct ChatRequest {
  std::string model;
  std::string prompt;
  double temperature = 0.0;
  int max_tokens = 4096;
  std::optional<std::uint64_t> seed;
};

enum class CallStatus { Ok, Retryable, AuthFailure, Permanent };

struct ChatResult {
  CallStatus status = CallStatus::Permanent;
  std::string content;
  std::string error;
  int http_status = 0;
};

class ChatClient {
 public:
  virtual ~ChatClient() = default;
  virtual ChatResult complete(const ChatRequest& request) = 0;
};

inline json chat_request_body(const ChatRequest& r) {
  json body = {{"model", r.model},
               {"messages", json::array({json{{"role", "user"}, {"content", r.prompt}}})},
               {"temperature", r.temperature},
               {"max_tokens", r.max_tokens}};
  if (r.seed) body["seed"] = *r.seed;
  return body;
}

inline ChatResult classify_http_response(int status, const std::string& body) {
  ChatResult out;
  out.http_status = status;
  if (status == 401 || status == 403) {
    out.status = CallStatus::AuthFailure;
    out.error = "HTTP " + std::to_string(status);
    return out;
  }
  if (status == 408 || status == 409 || status == 429 || status >= 500) {
    out.status = CallStatus::Retryable;
    out.error = "HTTP " + std::to_string(status);
    return out;
  }
  if (status != 200) {
    out.status = CallStatus::Permanent;
    out.error = "HTTP " + std::to_string(status);
    return out;
  }
  const json doc = json::parse(body, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded() || !doc.contains("choices") || !doc["choices"].is_array() || doc["choices"].empty()) {
    out.status = CallStatus::Permanent;
    out.error = "malformed completion body";
    return out;
  }
  const json& message = doc["choices"][0].value("message", json::object());
  if (!message.contains("content") || !message["content"].is_string()) {
    out.status = CallStatus::Permanent;
    out.error = "completion has no message content";
    return out;
  }
  out.status = CallStatus::Ok;
  out.content = message["content"].get<std::string>();
  return out;
}

class HttpChatClient : public ChatClient {
 public:
  HttpChatClient(const std::string& url, std::string api_key, std::chrono::duration<double> timeout) {
    const auto scheme_end = url.find("://");
    const auto host_end = url.find('/', scheme_end + 3);
    origin_ = url.substr(0, host_end);
    std::string base = host_end == std::string::npos ? std::string() : url.substr(host_end);
    while (!base.empty() && base.back() == '/') base.pop_back();
    constexpr std::string_view kSuffix = "/chat/completions";
    path_ = base.size() >= kSuffix.size() && base.compare(base.size() - kSuffix.size(), kSuffix.size(), kSuffix) == 0
                ? base
                : base + std::string(kSuffix);
    client_ = std::make_unique<httplib::Client>(origin_);
    const auto usec = std::chrono::duration_cast<std::chrono::microseconds>(timeout).count();
    client_->set_connection_timeout(usec / 1000000, usec % 1000000);
    client_->set_read_timeout(usec / 1000000, usec % 1000000);
    client_->set_write_timeout(usec / 1000000, usec % 1000000);
    client_->set_keep_alive(true);
    client_->set_tcp_nodelay(true);
    if (!api_key.empty()) client_->set_bearer_token_auth(api_key);
  }

  ChatResult complete(const ChatRequest& request) override {
    auto res = client_->Post(path_, chat_request_body(request).dump(), "application/json");
    if (!res) {
      ChatResult out;
      out.status = CallStatus::Retryable;
      out.error = "transport error: " + httplib::to_string(res.error());
      return out;
    }
    return classify_http_response(res->status, res->body);
  }

  const std::string& origin() const { return origin_; }
  const std::string& path() const { return path_; }

 private:
  std::string origin_;
  std::string path_;
  std::unique_ptr<httplib::Client> client_;
};

using ChatClientFactory = std::function<std::unique_ptr<ChatClient>(const EndpointConfig&)>;

// Resolves the endpoint's credential from the environment variable it names.
inline ChatClientFactory http_client_factory(std::chrono::duration<double> timeout = std::chrono::seconds(120)) {
  return [timeout](const EndpointConfig& ep) -> std::unique_ptr<ChatClient> {
    std::string key;
    if (!ep.api_key_env.empty())
      if (const char* v = std::getenv(ep.api_key_env.c_str())) key = v;
    return std::make_unique<HttpChatClient>(ep.url, std::move(key), timeout);
  };
}

}  // namespace judgebench
