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

// Local OpenAI-compatible endpoint for offline runs and tests.
//
// Each request is answered from the script of the requested model (or the
// default script) in this order:
//   1. the failure plan entry for the request's arrival index, if any;
//   2. a canned response keyed by request digest or "#<arrival index>";
//   3. with verdict_probability p: the preferred label with probability p,
//      drawn from a hash of (seed, request digest), else the other label;
//   4. otherwise fixed_choice.
// Draws depend only on the request, never on arrival order, so concurrent
// runs replay identically.

#pragma once

#include <atomic>
#include <chrono>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "httplib.h"
#include "judgebench/digest.hpp"
#include "judgebench/domain.hpp"

namespace judgebench {

enum class StubStep { Succeed, Fail, AuthFail };

// How the stub decides which label a well-calibrated judge would pick.
enum class PreferenceRule { LongerResponse, AlwaysA, AlwaysB };

struct StubScript {
  std::map<std::string, std::string> responses;
  std::vector<StubStep> failure_plan;
  std::optional<double> verdict_probability;
  std::uint64_t seed = 0;
  PreferenceRule preference = PreferenceRule::LongerResponse;
  std::string fixed_choice = "Model A";
  std::chrono::milliseconds latency{0};
};

inline void from_json(const json& j, StubScript& s) {
  s.responses = j.value("responses", std::map<std::string, std::string>{});
  s.failure_plan.clear();
  for (const auto& step : j.value("failure_plan", std::vector<std::string>{})) {
    if (step == "succeed") s.failure_plan.push_back(StubStep::Succeed);
    else if (step == "fail") s.failure_plan.push_back(StubStep::Fail);
    else if (step == "auth_fail") s.failure_plan.push_back(StubStep::AuthFail);
    else throw Error(ErrorCode::kInvalidArgument, "unknown failure_plan step '" + step + "'");
  }
  if (j.contains("verdict_probability") && !j["verdict_probability"].is_null())
    s.verdict_probability = j["verdict_probability"].get<double>();
  s.seed = j.value("seed", std::uint64_t{0});
  const auto pref = j.value("preference", std::string("longer_response"));
  if (pref == "longer_response") s.preference = PreferenceRule::LongerResponse;
  else if (pref == "always_a") s.preference = PreferenceRule::AlwaysA;
  else if (pref == "always_b") s.preference = PreferenceRule::AlwaysB;
  else throw Error(ErrorCode::kInvalidArgument, "unknown preference rule '" + pref + "'");
  s.fixed_choice = j.value("fixed_choice", std::string("Model A"));
  s.latency = std::chrono::milliseconds(j.value("latency_ms", 0));
}

inline std::string stub_request_digest(std::string_view model, std::string_view prompt,
                                       std::optional<std::uint64_t> seed) {
  return sha256_hex({model, prompt, seed ? std::to_string(*seed) : std::string("-")});
}

namespace detail {

inline std::string_view section(std::string_view prompt, std::string_view begin, std::string_view end) {
  const auto b = prompt.find(begin);
  if (b == std::string_view::npos) return {};
  const auto start = b + begin.size();
  const auto e = prompt.find(end, start);
  return prompt.substr(start, e == std::string_view::npos ? std::string_view::npos : e - start);
}

}  // namespace detail

// Label the stub prefers for a rendered judge prompt: "Model A" or "Model B".
inline std::string stub_preferred_label(std::string_view prompt, PreferenceRule rule) {
  switch (rule) {
    case PreferenceRule::AlwaysA: return "Model A";
    case PreferenceRule::AlwaysB: return "Model B";
    case PreferenceRule::LongerResponse: break;
  }
  const auto a = detail::section(prompt, "[Model A's Response]\n", "\n\n[Model B's Response]\n");
  const auto b = detail::section(prompt, "[Model B's Response]\n", "\n\n1. User's Demand:");
  return b.size() > a.size() ? "Model B" : "Model A";
}

// A reply in the judge's structured format, preceded by free-form reasoning.
inline std::string stub_judgment_text(std::string_view choice) {
  json reply = json::object();
  reply["User's Demand"] = "The user wants a correct and complete answer.";
  reply["Strengths of Model A"] = "Addresses the request.";
  reply["Weaknesses of Model A"] = "Could be more thorough.";
  reply["Strengths of Model B"] = "Addresses the request.";
  reply["Weaknesses of Model B"] = "Could be more thorough.";
  reply["Reasoning"] = "Weighing both responses against the demand, " + std::string(choice) + " is more suitable.";
  reply["Choice"] = std::string(choice);
  return "Let me compare both responses step by step.\n\n" + reply.dump(2);
}

class StubServer {
 public:
  explicit StubServer(StubScript default_script, std::map<std::string, StubScript> per_model = {})
      : default_{std::move(default_script)} {
    for (auto& [model, script] : per_model) per_model_[model].script = std::move(script);
    server_.new_task_queue = [] { return new httplib::ThreadPool(64); };
    server_.set_keep_alive_max_count(1000000);
    server_.set_tcp_nodelay(true);
    // The library default sets SO_REUSEPORT, which lets a second stub bind a
    // busy port silently.
    server_.set_socket_options([](socket_t sock) {
      int yes = 1;
      setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
    });
    auto handler = [this](const httplib::Request& req, httplib::Response& res) { handle(req, res); };
    server_.Post("/chat/completions", handler);
    server_.Post("/v1/chat/completions", handler);
    server_.Get("/health", [](const httplib::Request&, httplib::Response& res) {
      res.set_content("ok", "text/plain");
    });
  }

  ~StubServer() { stop(); }
  StubServer(const StubServer&) = delete;
  StubServer& operator=(const StubServer&) = delete;

  // Binds to the loopback interface. port 0 picks a free port.
  int start(int port = 0, const std::string& host = "127.0.0.1") {
    if (port == 0) {
      port_ = server_.bind_to_any_port(host);
    } else {
      port_ = server_.bind_to_port(host, port) ? port : -1;
    }
    if (port_ < 0) throw Error(ErrorCode::kPortInUse, "cannot bind " + host + ":" + std::to_string(port));
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
    return port_;
  }

  void stop() {
    if (thread_.joinable()) {
      server_.stop();
      thread_.join();
    }
  }

  // Blocks until stop() is called from another thread or a signal handler.
  void wait() {
    if (thread_.joinable()) thread_.join();
  }

  int port() const { return port_; }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1"; }

  int max_concurrency() const { return max_in_flight_.load(); }
  std::int64_t request_count() const { return total_.load(); }
  void reset_counters() {
    max_in_flight_ = 0;
    total_ = 0;
  }

 private:
  struct State {
    StubScript script;
    std::atomic<std::int64_t> arrivals{0};
  };

  State& state_for(const std::string& model) {
    auto it = per_model_.find(model);
    return it == per_model_.end() ? default_ : it->second;
  }

  void handle(const httplib::Request& req, httplib::Response& res) {
    const int now = ++in_flight_;
    int prev = max_in_flight_.load();
    while (now > prev && !max_in_flight_.compare_exchange_weak(prev, now)) {
    }
    ++total_;
    respond(req, res);
    --in_flight_;
  }

  void respond(const httplib::Request& req, httplib::Response& res) {
    const json body = json::parse(req.body, nullptr, /*allow_exceptions=*/false);
    if (body.is_discarded() || !body.contains("messages") || !body["messages"].is_array() ||
        body["messages"].empty()) {
      res.status = 400;
      res.set_content(R"({"error":{"message":"malformed request"}})", "application/json");
      return;
    }
    const std::string model = body.value("model", std::string{});
    const std::string prompt = body["messages"].back().value("content", std::string{});
    std::optional<std::uint64_t> seed;
    if (body.contains("seed") && body["seed"].is_number_unsigned()) seed = body["seed"].get<std::uint64_t>();

    State& state = state_for(model);
    const StubScript& script = state.script;
    const std::int64_t index = state.arrivals.fetch_add(1);
    if (script.latency.count() > 0) std::this_thread::sleep_for(script.latency);

    if (index < static_cast<std::int64_t>(script.failure_plan.size())) {
      const StubStep step = script.failure_plan[static_cast<std::size_t>(index)];
      if (step == StubStep::Fail) {
        res.status = 503;
        res.set_content(R"({"error":{"message":"scripted failure"}})", "application/json");
        return;
      }
      if (step == StubStep::AuthFail) {
        res.status = 401;
        res.set_content(R"({"error":{"message":"invalid api key"}})", "application/json");
        return;
      }
    }

    const std::string digest = stub_request_digest(model, prompt, seed);
    std::string content;
    if (auto it = script.responses.find(digest); it != script.responses.end()) {
      content = it->second;
    } else if (auto seq = script.responses.find("#" + std::to_string(index)); seq != script.responses.end()) {
      content = seq->second;
    } else if (script.verdict_probability) {
      const std::string preferred = stub_preferred_label(prompt, script.preference);
      const std::string other = preferred == "Model A" ? "Model B" : "Model A";
      const double u = digest_to_unit(sha256({std::to_string(script.seed), digest}));
      content = stub_judgment_text(u < *script.verdict_probability ? preferred : other);
    } else {
      content = stub_judgment_text(script.fixed_choice);
    }

    json reply = {{"id", "stub-" + digest.substr(0, 16)},
                  {"object", "chat.completion"},
                  {"model", model},
                  {"choices", json::array({json{{"index", 0},
                                                {"message", {{"role", "assistant"}, {"content", content}}},
                                                {"finish_reason", "stop"}}})}};
    res.status = 200;
    res.set_content(reply.dump(), "application/json");
  }

  httplib::Server server_;
  std::thread thread_;
  int port_ = -1;
  State default_;
  std::map<std::string, State> per_model_;
  std::atomic<int> in_flight_{0};
  std::atomic<int> max_in_flight_{0};
  std::atomic<std::int64_t> total_{0};
};

}  // namespace judgebench
