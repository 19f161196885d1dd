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

// Mixture-of-judges ground truth: strict majority over the usable verdicts of
// several ground-truth judges. Samples without a strict majority are excluded.

#pragma once

#include <array>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "judgebench/domain.hpp"

namespace judgebench {

struct ConsensusResult {
  Verdict verdict = Verdict::NoVerdict;
  int agreeing = 0;
  int total = 0;
  bool unanimous = false;

  bool operator==(const ConsensusResult&) const = default;
};

inline ConsensusResult majority_verdict(std::span<const Verdict> verdicts) {
  if (verdicts.empty()) throw Error(ErrorCode::kEmptyInput, "majority_verdict needs at least one verdict");
  std::array<int, 3> counts{};  // AWins, BWins, Tie
  for (Verdict v : verdicts) {
    switch (v) {
      case Verdict::AWins: ++counts[0]; break;
      case Verdict::BWins: ++counts[1]; break;
      case Verdict::Tie: ++counts[2]; break;
      case Verdict::NoVerdict: break;
    }
  }
  ConsensusResult result;
  result.total = counts[0] + counts[1] + counts[2];
  constexpr std::array<Verdict, 3> kinds{Verdict::AWins, Verdict::BWins, Verdict::Tie};
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    if (2 * counts[i] > result.total) {
      result.verdict = kinds[i];
      result.agreeing = counts[i];
      result.unanimous = counts[i] == result.total;
    }
  }
  return result;
}

inline ConsensusResult majority_verdict(std::initializer_list<Verdict> verdicts) {
  return majority_verdict(std::span<const Verdict>(verdicts.begin(), verdicts.size()));
}

struct GroundTruth {
  // Every input task, keyed by task id.
  std::map<std::string, ConsensusResult> results;
  // Task ids whose consensus verdict is NoVerdict, with the reason.
  std::map<std::string, std::string> excluded;

  bool included(const std::string& task_id) const {
    auto it = results.find(task_id);
    return it != results.end() && it->second.verdict != Verdict::NoVerdict;
  }
  std::size_t included_count() const { return results.size() - excluded.size(); }
};

inline std::string exclusion_reason(const ConsensusResult& r) {
  if (r.total == 0) return "no usable ground-truth verdicts";
  return "no strict majority among " + std::to_string(r.total) + " usable verdicts";
}

inline GroundTruth build_ground_truth(const std::map<std::string, std::vector<Verdict>>& per_sample) {
  GroundTruth gt;
  for (const auto& [task_id, verdicts] : per_sample) {
    ConsensusResult r = majority_verdict(verdicts);
    if (r.verdict == Verdict::NoVerdict) gt.excluded.emplace(task_id, exclusion_reason(r));
    gt.results.emplace(task_id, r);
  }
  return gt;
}

// Groups the records of several ground-truth judges by task, then votes.
// Returns the consensus as judgment records (judge id `consensus_id`, raw
// output empty) ordered by task id, along with the full GroundTruth.
struct ConsensusOutput {
  GroundTruth ground_truth;
  std::vector<JudgmentRecord> records;
};

inline ConsensusOutput consensus_from_records(std::span<const JudgmentRecord> gt_records,
                                              const std::string& consensus_id = "moj") {
  std::map<std::string, std::vector<Verdict>> per_sample;
  std::map<std::string, const ComparisonTask*> tasks;
  for (const auto& r : gt_records) {
    const std::string id = r.task.id();
    per_sample[id].push_back(r.verdict);
    tasks.emplace(id, &r.task);
  }
  ConsensusOutput out;
  out.ground_truth = build_ground_truth(per_sample);
  for (const auto& [id, result] : out.ground_truth.results) {
    JudgmentRecord rec;
    rec.task = *tasks.at(id);
    rec.judge_id = consensus_id;
    rec.verdict = result.verdict;
    rec.attempts = result.total;
    if (result.verdict == Verdict::NoVerdict) rec.error = out.ground_truth.excluded.at(id);
    out.records.push_back(std::move(rec));
  }
  return out;
}

inline void to_json(json& j, const ConsensusResult& r) {
  j = json{{"verdict", r.verdict}, {"agreeing", r.agreeing}, {"total", r.total}, {"unanimous", r.unanimous}};
}

// Sidecar lines: {"task_id", "reason", "total"} for every excluded task.
inline std::vector<json> exclusion_lines(const GroundTruth& gt) {
  std::vector<json> lines;
  for (const auto& [id, reason] : gt.excluded)
    lines.push_back(json{{"task_id", id}, {"reason", reason}, {"total", gt.results.at(id).total}});
  return lines;
}

}  // namespace judgebench
