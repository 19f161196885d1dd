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

// Domain types shared by every judgebench module, their record-format
// (de)serialization, and run configuration validation.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "judgebench/error.hpp"

namespace judgebench {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Verdict
// ---------------------------------------------------------------------------

enum class Verdict { AWins, BWins, Tie, NoVerdict };

inline std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::AWins: return "AWins";
    case Verdict::BWins: return "BWins";
    case Verdict::Tie: return "Tie";
    case Verdict::NoVerdict: return "NoVerdict";
  }
  return "NoVerdict";
}

inline Verdict verdict_from_string(std::string_view s) {
  if (s == "AWins") return Verdict::AWins;
  if (s == "BWins") return Verdict::BWins;
  if (s == "Tie") return Verdict::Tie;
  if (s == "NoVerdict") return Verdict::NoVerdict;
  throw Error(ErrorCode::kParseFailure, "unknown verdict '" + std::string(s) + "'");
}

inline bool is_binary(Verdict v) { return v == Verdict::AWins || v == Verdict::BWins; }

// Which display slot the candidate response occupies in the judge prompt.
enum class PositionAssignment { CandidateIsA, CandidateIsB };

inline std::string_view to_string(PositionAssignment p) {
  return p == PositionAssignment::CandidateIsA ? "CandidateIsA" : "CandidateIsB";
}

inline PositionAssignment position_from_string(std::string_view s) {
  if (s == "CandidateIsA") return PositionAssignment::CandidateIsA;
  if (s == "CandidateIsB") return PositionAssignment::CandidateIsB;
  throw Error(ErrorCode::kParseFailure, "unknown position_assignment '" + std::string(s) + "'");
}

inline PositionAssignment flipped(PositionAssignment p) {
  return p == PositionAssignment::CandidateIsA ? PositionAssignment::CandidateIsB
                                               : PositionAssignment::CandidateIsA;
}

enum class Language { zh, en };

inline std::string_view to_string(Language l) { return l == Language::zh ? "zh" : "en"; }

inline Language language_from_string(std::string_view s) {
  if (s == "zh") return Language::zh;
  if (s == "en") return Language::en;
  throw Error(ErrorCode::kParseFailure, "unknown language '" + std::string(s) + "'");
}

// ---------------------------------------------------------------------------
// ComparisonTask / JudgmentRecord
// ---------------------------------------------------------------------------

struct ComparisonTask {
  std::string query_id;
  std::string scenario;
  Language language = Language::en;
  std::string difficulty;
  std::string query;
  std::string policy_response;
  std::string candidate_model;
  std::string candidate_response;
  PositionAssignment position_assignment = PositionAssignment::CandidateIsA;

  // Unique within a run: (query, candidate) plus the slot, so position-swapped
  // twins stay distinct.
  std::string id() const {
    return query_id + "/" + candidate_model + "/" +
           (position_assignment == PositionAssignment::CandidateIsA ? "A" : "B");
  }

  const std::string& response_a() const {
    return position_assignment == PositionAssignment::CandidateIsA ? candidate_response
                                                                  : policy_response;
  }
  const std::string& response_b() const {
    return position_assignment == PositionAssignment::CandidateIsA ? policy_response
                                                                  : candidate_response;
  }

  bool operator==(const ComparisonTask&) const = default;
};

struct JudgmentRecord {
  ComparisonTask task;
  std::string judge_id;
  std::string raw_output;
  Verdict verdict = Verdict::NoVerdict;
  bool cached = false;
  int attempts = 0;
  // Set when the request permanently failed; the verdict is then NoVerdict.
  std::string error;

  bool operator==(const JudgmentRecord&) const = default;
};

// ---------------------------------------------------------------------------
// ScoreBoard / MetricReport
// ---------------------------------------------------------------------------

struct ScoreBoard {
  std::map<std::string, std::int64_t> scores;
  std::map<std::string, int> ranks;

  bool operator==(const ScoreBoard&) const = default;
};

struct MetricReport {
  std::int64_t n_samples = 0;
  std::int64_t n_agreements = 0;
  double accuracy_term = 0.0;
  double rank_penalty = 0.0;
  double score_penalty = 0.0;
  double final_score = 0.0;
  std::map<std::string, MetricReport> per_scenario;

  bool operator==(const MetricReport&) const = default;
};

// ---------------------------------------------------------------------------
// Policies and run configuration
// ---------------------------------------------------------------------------

enum class ParseMode { StructuredFirst, RegexOnly };

struct ParsePolicy {
  ParseMode mode = ParseMode::StructuredFirst;
  bool allow_tie = false;
  bool fallback_scan = true;
  // Key of the choice field inside the judge's structured reply.
  std::string choice_key = "Choice";

  bool operator==(const ParsePolicy&) const = default;
};

enum class TieBreak { ByModelId };

struct RankPolicy {
  TieBreak tie_break = TieBreak::ByModelId;
  bool operator==(const RankPolicy&) const = default;
};

enum class JudgeRole { GroundTruth, Test, Generator };

inline std::string_view to_string(JudgeRole r) {
  switch (r) {
    case JudgeRole::GroundTruth: return "gt";
    case JudgeRole::Test: return "test";
    case JudgeRole::Generator: return "generator";
  }
  return "test";
}

struct EndpointConfig {
  std::string id;
  std::string url;
  std::string model;
  // Name of the environment variable holding the API key; the key itself is
  // never written to any file.
  std::string api_key_env;
  JudgeRole role = JudgeRole::Test;

  bool operator==(const EndpointConfig&) const = default;
};

inline constexpr std::string_view kDefaultCacheDir = ".judgebench-cache";

struct RunConfig {
  std::vector<EndpointConfig> judges;
  std::vector<std::string> candidates;
  std::string policy_model = "gpt-4o-mini";
  int concurrency = 8;
  ParsePolicy parse_policy;
  RankPolicy tie_policy;
  bool swap_positions = false;
  std::string cache_dir = std::string(kDefaultCacheDir);
  std::string prompt_template = "cot";
  std::string style_directive;
  double temperature = 0.0;
  int max_tokens = 4096;
  int max_attempts = 3;
  int backoff_ms = 200;
  std::int64_t request_budget = 100000;
  double timeout_seconds = 120.0;
  std::uint64_t seed = 0;

  const EndpointConfig* find_judge(std::string_view id) const {
    for (const auto& j : judges)
      if (j.id == id) return &j;
    return nullptr;
  }

  bool operator==(const RunConfig&) const = default;
};

// ---------------------------------------------------------------------------
// Record format (one JSON object per line, field names as above)
// ---------------------------------------------------------------------------

inline void to_json(json& j, Verdict v) { j = std::string(to_string(v)); }
inline void from_json(const json& j, Verdict& v) { v = verdict_from_string(j.get<std::string>()); }

inline void to_json(json& j, const ComparisonTask& t) {
  j = json{{"query_id", t.query_id},
           {"scenario", t.scenario},
           {"language", std::string(to_string(t.language))},
           {"difficulty", t.difficulty},
           {"query", t.query},
           {"policy_response", t.policy_response},
           {"candidate_model", t.candidate_model},
           {"candidate_response", t.candidate_response},
           {"position_assignment", std::string(to_string(t.position_assignment))}};
}

inline void from_json(const json& j, ComparisonTask& t) {
  j.at("query_id").get_to(t.query_id);
  t.scenario = j.value("scenario", std::string{});
  t.language = language_from_string(j.value("language", std::string("en")));
  t.difficulty = j.value("difficulty", std::string{});
  t.query = j.value("query", std::string{});
  j.at("policy_response").get_to(t.policy_response);
  j.at("candidate_model").get_to(t.candidate_model);
  j.at("candidate_response").get_to(t.candidate_response);
  t.position_assignment = position_from_string(j.at("position_assignment").get<std::string>());
}

inline void to_json(json& j, const JudgmentRecord& r) {
  j = json{{"task", r.task},         {"judge_id", r.judge_id}, {"raw_output", r.raw_output},
           {"verdict", r.verdict},   {"cached", r.cached},     {"attempts", r.attempts}};
  if (!r.error.empty()) j["error"] = r.error;
}

inline void from_json(const json& j, JudgmentRecord& r) {
  j.at("task").get_to(r.task);
  j.at("judge_id").get_to(r.judge_id);
  r.raw_output = j.value("raw_output", std::string{});
  j.at("verdict").get_to(r.verdict);
  r.cached = j.value("cached", false);
  r.attempts = j.value("attempts", 0);
  r.error = j.value("error", std::string{});
}

inline void to_json(json& j, const ScoreBoard& b) {
  j = json{{"scores", b.scores}, {"ranks", b.ranks}};
}

inline void from_json(const json& j, ScoreBoard& b) {
  j.at("scores").get_to(b.scores);
  b.ranks = j.value("ranks", std::map<std::string, int>{});
}

inline void to_json(json& j, const MetricReport& m) {
  j = json{{"n_samples", m.n_samples},         {"n_agreements", m.n_agreements},
           {"accuracy_term", m.accuracy_term}, {"rank_penalty", m.rank_penalty},
           {"score_penalty", m.score_penalty}, {"final_score", m.final_score}};
  json scenarios = json::object();
  for (const auto& [name, sub] : m.per_scenario) scenarios[name] = sub;
  j["per_scenario"] = std::move(scenarios);
}

inline void from_json(const json& j, MetricReport& m) {
  j.at("n_samples").get_to(m.n_samples);
  j.at("n_agreements").get_to(m.n_agreements);
  j.at("accuracy_term").get_to(m.accuracy_term);
  j.at("rank_penalty").get_to(m.rank_penalty);
  j.at("score_penalty").get_to(m.score_penalty);
  j.at("final_score").get_to(m.final_score);
  m.per_scenario.clear();
  if (auto it = j.find("per_scenario"); it != j.end())
    for (const auto& [name, sub] : it->items()) m.per_scenario[name] = sub.get<MetricReport>();
}

inline void to_json(json& j, const ParsePolicy& p) {
  j = json{{"mode", p.mode == ParseMode::StructuredFirst ? "structured_first" : "regex_only"},
           {"allow_tie", p.allow_tie},
           {"fallback_scan", p.fallback_scan},
           {"choice_key", p.choice_key}};
}

inline void to_json(json& j, const EndpointConfig& e) {
  j = json{{"id", e.id},
           {"url", e.url},
           {"model", e.model},
           {"api_key_env", e.api_key_env},
           {"role", std::string(to_string(e.role))}};
}

inline void to_json(json& j, const RunConfig& c) {
  j = json{{"judges", c.judges},
           {"candidates", c.candidates},
           {"policy_model", c.policy_model},
           {"concurrency", c.concurrency},
           {"parse_policy", c.parse_policy},
           {"tie_policy", "by_model_id"},
           {"swap_positions", c.swap_positions},
           {"cache_dir", c.cache_dir},
           {"prompt_template", c.prompt_template},
           {"style_directive", c.style_directive},
           {"temperature", c.temperature},
           {"max_tokens", c.max_tokens},
           {"max_attempts", c.max_attempts},
           {"backoff_ms", c.backoff_ms},
           {"request_budget", c.request_budget},
           {"timeout_seconds", c.timeout_seconds},
           {"seed", c.seed}};
}

namespace detail {

template <typename T>
T field_or(const json& obj, const char* key, T fallback, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, e.what(), path + "." + key);
  }
}

inline const json& required(const json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null())
    throw Error(ErrorCode::kMissingField, "required field is absent", path + "." + key);
  return *it;
}

inline std::string required_string(const json& obj, const char* key, const std::string& path) {
  const json& v = required(obj, key, path);
  if (!v.is_string())
    throw Error(ErrorCode::kInvalidArgument, "expected a string", path + "." + key);
  return v.get<std::string>();
}

}  // namespace detail

// Validates a parsed config document and fills defaults (position swapping
// off, ties disallowed, default cache directory).
inline RunConfig validate_run_config(const json& raw) {
  const std::string root = "$";
  if (!raw.is_object()) throw Error(ErrorCode::kInvalidArgument, "config must be an object", root);

  RunConfig cfg;

  const json& judges = detail::required(raw, "judges", root);
  if (!judges.is_array() || judges.empty())
    throw Error(ErrorCode::kMissingField, "at least one judge endpoint is required", root + ".judges");
  std::set<std::string> judge_ids;
  for (std::size_t i = 0; i < judges.size(); ++i) {
    const std::string path = root + ".judges[" + std::to_string(i) + "]";
    const json& j = judges[i];
    if (!j.is_object()) throw Error(ErrorCode::kInvalidEndpoint, "endpoint must be an object", path);
    EndpointConfig ep;
    ep.url = detail::required_string(j, "url", path);
    ep.model = detail::required_string(j, "model", path);
    if (ep.model.empty()) throw Error(ErrorCode::kInvalidEndpoint, "empty model name", path + ".model");
    if (ep.url.rfind("http://", 0) != 0 && ep.url.rfind("https://", 0) != 0)
      throw Error(ErrorCode::kInvalidEndpoint, "url must use http:// or https://", path + ".url");
    if (ep.url.find_first_of(" \t\r\n") != std::string::npos)
      throw Error(ErrorCode::kInvalidEndpoint, "url contains whitespace", path + ".url");
    ep.id = detail::field_or<std::string>(j, "id", ep.model, path);
    if (ep.id.empty()) ep.id = ep.model;
    if (!judge_ids.insert(ep.id).second)
      throw Error(ErrorCode::kInvalidEndpoint, "duplicate judge id '" + ep.id + "'", path + ".id");
    ep.api_key_env = detail::field_or<std::string>(j, "api_key_env", "", path);
    const auto role = detail::field_or<std::string>(j, "role", "test", path);
    if (role == "gt") ep.role = JudgeRole::GroundTruth;
    else if (role == "test") ep.role = JudgeRole::Test;
    else if (role == "generator") ep.role = JudgeRole::Generator;
    else throw Error(ErrorCode::kInvalidEndpoint, "role must be gt, test or generator", path + ".role");
    cfg.judges.push_back(std::move(ep));
  }

  const json& candidates = detail::required(raw, "candidates", root);
  if (!candidates.is_array())
    throw Error(ErrorCode::kInvalidArgument, "candidates must be an array", root + ".candidates");
  std::set<std::string> seen;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const std::string path = root + ".candidates[" + std::to_string(i) + "]";
    if (!candidates[i].is_string() || candidates[i].get<std::string>().empty())
      throw Error(ErrorCode::kInvalidArgument, "candidate must be a non-empty string", path);
    auto name = candidates[i].get<std::string>();
    if (!seen.insert(name).second)
      throw Error(ErrorCode::kInvalidArgument, "duplicate candidate '" + name + "'", path);
    cfg.candidates.push_back(std::move(name));
  }
  if (cfg.candidates.size() < 2)
    throw Error(ErrorCode::kEmptyModelSet, "need at least 2 candidate models, got " +
                                               std::to_string(cfg.candidates.size()),
                root + ".candidates");

  cfg.policy_model = detail::field_or<std::string>(raw, "policy_model", cfg.policy_model, root);
  cfg.concurrency = detail::field_or<int>(raw, "concurrency", cfg.concurrency, root);
  if (cfg.concurrency < 1)
    throw Error(ErrorCode::kInvalidArgument, "concurrency must be >= 1", root + ".concurrency");

  if (auto it = raw.find("parse_policy"); it != raw.end() && it->is_object()) {
    const std::string path = root + ".parse_policy";
    const auto mode = detail::field_or<std::string>(*it, "mode", "structured_first", path);
    if (mode == "structured_first") cfg.parse_policy.mode = ParseMode::StructuredFirst;
    else if (mode == "regex_only") cfg.parse_policy.mode = ParseMode::RegexOnly;
    else throw Error(ErrorCode::kInvalidArgument, "unknown parse mode '" + mode + "'", path + ".mode");
    cfg.parse_policy.allow_tie = detail::field_or<bool>(*it, "allow_tie", false, path);
    cfg.parse_policy.fallback_scan = detail::field_or<bool>(*it, "fallback_scan", true, path);
    cfg.parse_policy.choice_key = detail::field_or<std::string>(*it, "choice_key", "Choice", path);
    if (cfg.parse_policy.choice_key.empty())
      throw Error(ErrorCode::kInvalidArgument, "choice_key must be non-empty", path + ".choice_key");
  }
  cfg.parse_policy.allow_tie =
      detail::field_or<bool>(raw, "allow_ties", cfg.parse_policy.allow_tie, root);

  const auto tie_policy = detail::field_or<std::string>(raw, "tie_policy", "by_model_id", root);
  if (tie_policy != "by_model_id")
    throw Error(ErrorCode::kInvalidArgument, "unknown tie policy '" + tie_policy + "'",
                root + ".tie_policy");

  cfg.swap_positions = detail::field_or<bool>(raw, "swap_positions", false, root);
  cfg.cache_dir = detail::field_or<std::string>(raw, "cache_dir", cfg.cache_dir, root);
  if (cfg.cache_dir.empty()) cfg.cache_dir = std::string(kDefaultCacheDir);
  cfg.prompt_template = detail::field_or<std::string>(raw, "prompt_template", cfg.prompt_template, root);
  cfg.style_directive = detail::field_or<std::string>(raw, "style_directive", "", root);
  cfg.temperature = detail::field_or<double>(raw, "temperature", cfg.temperature, root);
  cfg.max_tokens = detail::field_or<int>(raw, "max_tokens", cfg.max_tokens, root);
  cfg.max_attempts = detail::field_or<int>(raw, "max_attempts", cfg.max_attempts, root);
  if (cfg.max_attempts < 1)
    throw Error(ErrorCode::kInvalidArgument, "max_attempts must be >= 1", root + ".max_attempts");
  cfg.backoff_ms = detail::field_or<int>(raw, "backoff_ms", cfg.backoff_ms, root);
  cfg.request_budget = detail::field_or<std::int64_t>(raw, "request_budget", cfg.request_budget, root);
  if (cfg.request_budget < 1)
    throw Error(ErrorCode::kInvalidArgument, "request_budget must be >= 1", root + ".request_budget");
  cfg.timeout_seconds = detail::field_or<double>(raw, "timeout_seconds", cfg.timeout_seconds, root);
  cfg.seed = detail::field_or<std::uint64_t>(raw, "seed", cfg.seed, root);
  return cfg;
}

}  // namespace judgebench
