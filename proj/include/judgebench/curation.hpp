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

// Judge training-data curation: render judgment prompts for labelled pairs,
// sample M judgments per prompt, keep the ones whose final choice matches the
// label (reward 1), and write training records plus an audit trail.

#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "judgebench/chat_client.hpp"
#include "judgebench/domain.hpp"
#include "judgebench/prompts.hpp"
#include "judgebench/records.hpp"
#include "judgebench/verdict_parser.hpp"

namespace judgebench {

// Rule-based reward: 1 iff the judgment's choice equals the label.
inline int reward(Verdict prediction, Verdict gt) {
  if (!is_binary(gt)) throw Error(ErrorCode::kInvalidArgument, "ground-truth label must be AWins or BWins");
  return prediction == gt ? 1 : 0;
}

// Knowledge-style sources are verified against a reference label; style
// pairs use the detail-preference prompt.
enum class CurationMode { VerifyGroundTruth, StylePair };

// One labelled pair from a user-supplied source dataset. `source` carries
// the dataset name and any provenance/cutoff tag.
struct CurationItem {
  std::string id;
  std::string query;
  std::string response_a;
  std::string response_b;
  Verdict label = Verdict::AWins;
  std::string source;
};

inline void from_json(const json& j, CurationItem& c) {
  j.at("id").get_to(c.id);
  c.query = j.value("query", std::string{});
  j.at("response_a").get_to(c.response_a);
  j.at("response_b").get_to(c.response_b);
  const auto label = j.at("label").get<std::string>();
  const Verdict v = label == "A" ? Verdict::AWins : label == "B" ? Verdict::BWins : verdict_from_string(label);
  if (!is_binary(v)) throw Error(ErrorCode::kInvalidArgument, "label must be A/B or AWins/BWins", c.id);
  c.label = v;
  c.source = j.value("source", std::string{});
}

inline void to_json(json& j, const CurationItem& c) {
  j = json{{"id", c.id},       {"query", c.query}, {"response_a", c.response_a}, {"response_b", c.response_b},
           {"label", c.label}, {"source", c.source}};
}

// A rendered instruction waiting for sampled judgments.
struct PromptRecord {
  std::string id;
  std::string instruction;
  Verdict gt_label = Verdict::AWins;
  std::string source;

  bool operator==(const PromptRecord&) const = default;
};

inline void to_json(json& j, const PromptRecord& p) {
  j = json{{"id", p.id}, {"instruction", p.instruction}, {"gt_label", p.gt_label}, {"source", p.source}};
}

inline void from_json(const json& j, PromptRecord& p) {
  j.at("id").get_to(p.id);
  j.at("instruction").get_to(p.instruction);
  j.at("gt_label").get_to(p.gt_label);
  p.source = j.value("source", std::string{});
}

inline PromptRecord make_prompt_record(const CurationItem& item, CurationMode mode,
                                       std::string_view directive = kDetailPreferenceDirective) {
  ComparisonTask task;
  task.query_id = item.id;
  task.query = item.query;
  task.candidate_response = item.response_a;
  task.policy_response = item.response_b;
  task.position_assignment = PositionAssignment::CandidateIsA;
  PromptRecord rec{item.id, {}, item.label, item.source};
  rec.instruction = mode == CurationMode::StylePair ? render_style_prompt(task, directive) : render_cot_prompt(task);
  return rec;
}

struct CurationRecord {
  std::string id;
  std::string instruction;
  std::vector<std::string> candidates;
  Verdict gt_label = Verdict::AWins;
  // Span of the choice value inside each candidate; empty when unparseable.
  std::vector<std::optional<TextSpan>> prediction_positions;
  std::vector<bool> accepted;
  std::string source;

  std::size_t accepted_count() const { return static_cast<std::size_t>(std::count(accepted.begin(), accepted.end(), true)); }

  bool operator==(const CurationRecord&) const = default;
};

inline void to_json(json& j, const TextSpan& s) { j = json{{"offset", s.offset}, {"length", s.length}}; }
inline void from_json(const json& j, TextSpan& s) {
  j.at("offset").get_to(s.offset);
  j.at("length").get_to(s.length);
}

inline void to_json(json& j, const CurationRecord& r) {
  json positions = json::array();
  for (const auto& p : r.prediction_positions) positions.push_back(p ? json(*p) : json(nullptr));
  j = json{{"id", r.id},
           {"instruction", r.instruction},
           {"candidates", r.candidates},
           {"gt_label", r.gt_label},
           {"prediction_positions", std::move(positions)},
           {"accepted", r.accepted},
           {"source", r.source}};
}

inline void from_json(const json& j, CurationRecord& r) {
  j.at("id").get_to(r.id);
  j.at("instruction").get_to(r.instruction);
  j.at("candidates").get_to(r.candidates);
  j.at("gt_label").get_to(r.gt_label);
  r.prediction_positions.clear();
  for (const auto& p : j.at("prediction_positions"))
    r.prediction_positions.push_back(p.is_null() ? std::nullopt : std::optional<TextSpan>(p.get<TextSpan>()));
  j.at("accepted").get_to(r.accepted);
  r.source = j.value("source", std::string{});
  if (r.accepted.size() != r.candidates.size() || r.prediction_positions.size() != r.candidates.size())
    throw Error(ErrorCode::kParseFailure, "candidate/flag count mismatch", r.id);
}

// Produces one judgment text per call.
class JudgmentGenerator {
 public:
  virtual ~JudgmentGenerator() = default;
  virtual std::string generate(const std::string& prompt, std::size_t sample_index) = 0;
};

// Samples from a chat endpoint; sample j is requested with seed base_seed + j
// so repeated runs draw the same candidates from seed-honouring servers.
class EndpointGenerator : public JudgmentGenerator {
 public:
  EndpointGenerator(std::unique_ptr<ChatClient> client, std::string model, double temperature = 1.0,
                    int max_tokens = 4096, int max_attempts = 3,
                    std::chrono::milliseconds backoff = std::chrono::milliseconds(200), std::uint64_t base_seed = 0)
      : client_(std::move(client)),
        model_(std::move(model)),
        temperature_(temperature),
        max_tokens_(max_tokens),
        max_attempts_(max_attempts),
        backoff_(backoff),
        base_seed_(base_seed) {}

  std::string generate(const std::string& prompt, std::size_t sample_index) override {
    const ChatRequest request{model_, prompt, temperature_, max_tokens_, base_seed_ + sample_index};
    ChatResult result;
    for (int attempt = 1; attempt <= max_attempts_; ++attempt) {
      result = client_->complete(request);
      if (result.status == CallStatus::Ok) return result.content;
      if (result.status == CallStatus::AuthFailure) throw Error(ErrorCode::kEndpointAuthFailure, result.error, model_);
      if (result.status == CallStatus::Permanent) break;
      if (attempt < max_attempts_) std::this_thread::sleep_for(backoff_ * (1LL << (attempt - 1)));
    }
    throw Error(ErrorCode::kGeneratorFailure, result.error, model_);
  }

 private:
  std::unique_ptr<ChatClient> client_;
  std::string model_;
  double temperature_;
  int max_tokens_;
  int max_attempts_;
  std::chrono::milliseconds backoff_;
  std::uint64_t base_seed_;
};

inline CurationRecord rejection_sample(JudgmentGenerator& generator, const PromptRecord& prompt, std::size_t m,
                                       const ParsePolicy& policy = {}) {
  if (m < 1) throw Error(ErrorCode::kInvalidArgument, "need at least one sample per instruction");
  if (!is_binary(prompt.gt_label)) throw Error(ErrorCode::kInvalidArgument, "label must be AWins or BWins", prompt.id);
  CurationRecord rec;
  rec.id = prompt.id;
  rec.instruction = prompt.instruction;
  rec.gt_label = prompt.gt_label;
  rec.source = prompt.source;
  for (std::size_t j = 0; j < m; ++j) {
    std::string text = generator.generate(prompt.instruction, j);
    const ChoiceExtraction choice = extract_choice(text, policy);
    rec.accepted.push_back(reward(choice.verdict, prompt.gt_label) == 1);
    rec.prediction_positions.push_back(choice.span);
    rec.candidates.push_back(std::move(text));
  }
  return rec;
}

using GeneratorFactory = std::function<std::unique_ptr<JudgmentGenerator>()>;

// Parallel over prompts with one generator per worker; output order matches
// the input order.
inline std::vector<CurationRecord> rejection_sample_all(const GeneratorFactory& make_generator,
                                                        std::span<const PromptRecord> prompts, std::size_t m,
                                                        int concurrency, const ParsePolicy& policy = {}) {
  std::vector<CurationRecord> out(prompts.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> abort{false};
  std::exception_ptr first_error;
  std::mutex mu;
  auto worker = [&] {
    try {
      auto gen = make_generator();
      while (!abort.load()) {
        const std::size_t i = next.fetch_add(1);
        if (i >= prompts.size()) break;
        out[i] = rejection_sample(*gen, prompts[i], m, policy);
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(mu);
      if (!first_error) first_error = std::current_exception();
      abort.store(true);
    }
  };
  {
    std::vector<std::jthread> pool;
    const int n = std::max(1, std::min<int>(concurrency, static_cast<int>(std::max<std::size_t>(1, prompts.size()))));
    for (int w = 0; w < n; ++w) pool.emplace_back(worker);
  }
  if (first_error) std::rethrow_exception(first_error);
  return out;
}

enum class Split { SFT, RFT };

struct EmitSummary {
  std::size_t lines = 0;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t records_without_accepted = 0;
  std::vector<std::string> warnings;
};

inline json training_line(const CurationRecord& r, std::size_t j) {
  return json{{"instruction", r.instruction},
              {"response", r.candidates[j]},
              {"label", r.gt_label},
              {"prediction_position", r.prediction_positions[j] ? json(*r.prediction_positions[j]) : json(nullptr)},
              {"source", r.source},
              {"accepted_count", r.accepted_count()},
              {"total_count", r.candidates.size()}};
}

// RFT keeps every accepted candidate; SFT keeps one verified judgment per
// instruction. Rejected candidates always go to the audit file.
inline EmitSummary emit_training_records(std::span<const CurationRecord> records, Split split,
                                         const std::filesystem::path& out_path,
                                         const std::filesystem::path& audit_path,
                                         const ParsePolicy& policy = {}) {
  EmitSummary summary;
  std::vector<json> lines, audit;
  for (const auto& r : records) {
    bool emitted = false;
    for (std::size_t j = 0; j < r.candidates.size(); ++j) {
      if (r.accepted[j]) {
        ++summary.accepted;
        if (split == Split::RFT || !emitted) {
          lines.push_back(training_line(r, j));
          emitted = true;
        }
      } else {
        ++summary.rejected;
        audit.push_back(json{{"id", r.id},
                             {"instruction", r.instruction},
                             {"response", r.candidates[j]},
                             {"label", r.gt_label},
                             {"parsed_verdict", parse_verdict(r.candidates[j], policy)},
                             {"source", r.source}});
      }
    }
    if (!emitted) {
      ++summary.records_without_accepted;
      summary.warnings.push_back("EmptyOutput: record '" + r.id + "' has 0 of " + std::to_string(r.candidates.size()) +
                                 " candidates accepted");
    }
  }
  summary.lines = lines.size();
  if (summary.lines == 0) summary.warnings.push_back("EmptyOutput: no candidates accepted in the whole batch");
  write_json_lines(out_path, lines);
  write_json_lines(audit_path, audit);
  return summary;
}

}  // namespace judgebench
