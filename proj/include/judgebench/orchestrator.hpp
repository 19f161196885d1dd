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

// Planning and execution of pairwise judging: every benchmark query is paired
// with every candidate model against the fixed policy response, and each
// comparison is sent to every judge through a bounded worker pool with
// caching, retry and a hard request budget.

#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <set>
#include <span>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "judgebench/cache.hpp"
#include "judgebench/chat_client.hpp"
#include "judgebench/domain.hpp"
#include "judgebench/metrics.hpp"
#include "judgebench/prompts.hpp"
#include "judgebench/verdict_parser.hpp"

namespace judgebench {

// One benchmark query with the policy response and every candidate response.
struct DatasetItem {
  std::string query_id;
  std::string scenario;
  Language language = Language::en;
  std::string difficulty;
  std::string query;
  std::string policy_response;
  std::map<std::string, std::string> responses;

  bool operator==(const DatasetItem&) const = default;
};

inline void to_json(json& j, const DatasetItem& d) {
  j = json{{"query_id", d.query_id}, {"scenario", d.scenario},
           {"language", std::string(to_string(d.language))},
           {"difficulty", d.difficulty}, {"query", d.query},
           {"policy_response", d.policy_response}, {"responses", d.responses}};
}

inline void from_json(const json& j, DatasetItem& d) {
  j.at("query_id").get_to(d.query_id);
  d.scenario = j.value("scenario", std::string{});
  d.language = language_from_string(j.value("language", std::string("en")));
  d.difficulty = j.value("difficulty", std::string{});
  d.query = j.value("query", std::string{});
  d.policy_response = j.value("policy_response", std::string{});
  d.responses = j.value("responses", std::map<std::string, std::string>{});
}

struct JudgePlan {
  std::vector<ComparisonTask> tasks;
  std::vector<std::string> judges;
  std::string prompt_template_id;
  bool swap_positions = false;
};

inline JudgePlan plan_comparisons(std::span<const DatasetItem> dataset, const RunConfig& config) {
  JudgePlan plan;
  plan.prompt_template_id = config.prompt_template;
  plan.swap_positions = config.swap_positions;
  for (const auto& j : config.judges)
    if (j.role != JudgeRole::Generator) plan.judges.push_back(j.id);

  std::mt19937_64 rng(config.seed);
  std::set<std::string> seen;
  plan.tasks.reserve(dataset.size() * config.candidates.size() * (config.swap_positions ? 2 : 1));
  for (const auto& item : dataset) {
    if (!seen.insert(item.query_id).second)
      throw Error(ErrorCode::kInvalidArgument, "duplicate query_id", item.query_id);
    if (item.policy_response.empty())
      throw Error(ErrorCode::kMissingResponse, "missing policy response", item.query_id + "/" + config.policy_model);
    for (const auto& model : config.candidates) {
      auto it = item.responses.find(model);
      if (it == item.responses.end() || it->second.empty())
        throw Error(ErrorCode::kMissingResponse, "missing candidate response", item.query_id + "/" + model);
      ComparisonTask task{item.query_id, item.scenario,    item.language, item.difficulty,
                          item.query,    item.policy_response, model,     it->second,
                          PositionAssignment::CandidateIsA};
      if (config.swap_positions) {
        plan.tasks.push_back(task);
        task.position_assignment = PositionAssignment::CandidateIsB;
        plan.tasks.push_back(std::move(task));
      } else {
        task.position_assignment = (rng() & 1U) ? PositionAssignment::CandidateIsB : PositionAssignment::CandidateIsA;
        plan.tasks.push_back(std::move(task));
      }
    }
  }
  return plan;
}

struct ExecutionStats {
  std::int64_t requests = 0;    // network calls made, including retries
  std::int64_t cache_hits = 0;
  std::int64_t retries = 0;
  std::int64_t failures = 0;    // records that ended without a reply
};

struct ExecutionResult {
  std::vector<JudgmentRecord> records;
  ExecutionStats stats;
};

namespace detail {

struct WorkItem {
  const ComparisonTask* task;
  const EndpointConfig* judge;
};

class RequestBudget {
 public:
  explicit RequestBudget(std::int64_t cap) : cap_(cap) {}
  // Reserves one request; false once the cap is reached.
  bool acquire() { return used_.fetch_add(1) < cap_; }
  std::int64_t used() const { return std::min<std::int64_t>(used_.load(), cap_); }

 private:
  std::int64_t cap_;
  std::atomic<std::int64_t> used_{0};
};

}  // namespace detail

// Runs every (task, judge) pair of the plan. Records come back sorted by
// (task id, judge id) regardless of completion order.
inline ExecutionResult execute(const JudgePlan& plan, const RunConfig& config,
                               const ChatClientFactory& factory = {}) {
  const ChatClientFactory make_client =
      factory ? factory
              : http_client_factory(std::chrono::duration<double>(config.timeout_seconds));

  std::vector<detail::WorkItem> items;
  items.reserve(plan.tasks.size() * plan.judges.size());
  for (const auto& judge_id : plan.judges) {
    const EndpointConfig* ep = config.find_judge(judge_id);
    if (!ep) throw Error(ErrorCode::kInvalidEndpoint, "no endpoint configured for judge", judge_id);
  }
  for (const auto& task : plan.tasks)
    for (const auto& judge_id : plan.judges) items.push_back({&task, config.find_judge(judge_id)});

  ResponseCache cache(config.cache_dir);
  detail::RequestBudget budget(config.request_budget);
  std::vector<JudgmentRecord> records(items.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> abort{false};
  std::atomic<std::int64_t> requests{0}, cache_hits{0}, retries{0}, failures{0};
  std::exception_ptr first_error;
  std::mutex error_mu;

  auto worker = [&]() {
    std::map<std::string, std::unique_ptr<ChatClient>> clients;
    while (!abort.load()) {
      const std::size_t i = next.fetch_add(1);
      if (i >= items.size()) break;
      try {
        const auto& [task, judge] = items[i];
        JudgmentRecord& rec = records[i];
        rec.task = *task;
        rec.judge_id = judge->id;

        const std::string prompt = render_prompt(plan.prompt_template_id, *task, config.style_directive);
        const std::string key = cache_key(judge->id, plan.prompt_template_id, prompt);
        if (auto hit = cache.lookup(key)) {
          rec.raw_output = std::move(hit->raw_output);
          rec.cached = true;
          rec.verdict = parse_verdict(rec.raw_output, config.parse_policy);
          ++cache_hits;
          continue;
        }

        auto& client = clients[judge->id];
        if (!client) client = make_client(*judge);
        const ChatRequest request{judge->model, prompt, config.temperature, config.max_tokens, std::nullopt};
        ChatResult result;
        for (int attempt = 1; attempt <= config.max_attempts; ++attempt) {
          if (!budget.acquire())
            throw Error(ErrorCode::kBudgetExceeded,
                        "request budget of " + std::to_string(config.request_budget) + " reached");
          ++requests;
          rec.attempts = attempt;
          result = client->complete(request);
          if (result.status == CallStatus::AuthFailure)
            throw Error(ErrorCode::kEndpointAuthFailure, result.error, judge->id);
          if (result.status != CallStatus::Retryable || attempt == config.max_attempts) break;
          ++retries;
          std::this_thread::sleep_for(std::chrono::milliseconds(config.backoff_ms) * (1LL << (attempt - 1)));
        }
        if (result.status == CallStatus::Ok) {
          rec.raw_output = std::move(result.content);
          rec.verdict = parse_verdict(rec.raw_output, config.parse_policy);
          cache.store({key, judge->id, plan.prompt_template_id, rec.raw_output, utc_timestamp()});
        } else {
          rec.verdict = Verdict::NoVerdict;
          rec.error = "failed after " + std::to_string(rec.attempts) + " attempt(s): " + result.error;
          ++failures;
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!first_error) first_error = std::current_exception();
        abort.store(true);
      }
    }
  };

  const std::size_t n_workers =
      std::max<std::size_t>(1, std::min<std::size_t>(static_cast<std::size_t>(config.concurrency), items.size()));
  {
    std::vector<std::jthread> pool;
    pool.reserve(n_workers);
    for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  }
  if (first_error) std::rethrow_exception(first_error);

  std::vector<std::string> ids(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) ids[i] = records[i].task.id();
  std::vector<std::size_t> order(records.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (ids[a] != ids[b]) return ids[a] < ids[b];
    return records[a].judge_id < records[b].judge_id;
  });

  ExecutionResult out;
  out.records.reserve(records.size());
  for (std::size_t i : order) out.records.push_back(std::move(records[i]));
  out.stats = {requests.load(), cache_hits.load(), retries.load(), failures.load()};
  return out;
}

inline std::vector<JudgmentRecord> records_for_judge(std::span<const JudgmentRecord> records,
                                                     std::string_view judge_id) {
  std::vector<JudgmentRecord> out;
  for (const auto& r : records)
    if (r.judge_id == judge_id) out.push_back(r);
  return out;
}

struct PositionBias {
  std::int64_t pairs = 0;          // swapped twins where both verdicts parsed
  std::int64_t disagreements = 0;  // twins whose candidate outcomes differ
  double rate() const { return pairs == 0 ? 0.0 : static_cast<double>(disagreements) / static_cast<double>(pairs); }
};

// Compares each record with its position-swapped twin from the same judge.
inline PositionBias position_bias(std::span<const JudgmentRecord> records) {
  std::map<std::tuple<std::string, std::string, std::string>, std::pair<const JudgmentRecord*, const JudgmentRecord*>> twins;
  for (const auto& r : records) {
    auto& slot = twins[{r.judge_id, r.task.query_id, r.task.candidate_model}];
    (r.task.position_assignment == PositionAssignment::CandidateIsA ? slot.first : slot.second) = &r;
  }
  PositionBias bias;
  for (const auto& [key, pair] : twins) {
    const auto* a = pair.first;
    const auto* b = pair.second;
    if (!a || !b || a->verdict == Verdict::NoVerdict || b->verdict == Verdict::NoVerdict) continue;
    ++bias.pairs;
    if (unswap(*a) != unswap(*b)) ++bias.disagreements;
  }
  return bias;
}

}  // namespace judgebench
