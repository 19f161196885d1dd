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

// Judge quality metric: sample-level agreement with the ground truth minus
// normalized penalties on the induced leaderboard,
//
//   P = 100*C/N - (100/|M|) * sum_m |r1_m - r2_m| / (|M|-1)
//               - (100/|M|) * sum_m |s1_m - s2_m| / max_m' |s1_m' - s2_m'|
//
// where s_m counts the samples in which candidate m beat the policy model and
// r_m is its rank (1 = most wins). The score term is 0 when every gap is 0.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "judgebench/domain.hpp"

namespace judgebench {

enum class CandidateOutcome { Win, Loss, Tie };

// Maps a display-label verdict back onto the candidate.
inline CandidateOutcome unswap(Verdict verdict, PositionAssignment assignment) {
  switch (verdict) {
    case Verdict::AWins:
      return assignment == PositionAssignment::CandidateIsA ? CandidateOutcome::Win : CandidateOutcome::Loss;
    case Verdict::BWins:
      return assignment == PositionAssignment::CandidateIsB ? CandidateOutcome::Win : CandidateOutcome::Loss;
    case Verdict::Tie:
      return CandidateOutcome::Tie;
    case Verdict::NoVerdict:
      break;
  }
  throw Error(ErrorCode::kInvalidArgument, "NoVerdict has no candidate outcome");
}

inline CandidateOutcome unswap(const JudgmentRecord& record) {
  return unswap(record.verdict, record.task.position_assignment);
}

struct CandidateResult {
  std::string model;
  CandidateOutcome outcome = CandidateOutcome::Loss;
};

// s_m = number of samples where candidate m was judged superior to the policy
// model. Models in `models` without samples score 0.
inline ScoreBoard accumulate_scores(std::span<const CandidateResult> results,
                                    std::span<const std::string> models) {
  ScoreBoard board;
  for (const auto& m : models) board.scores[m] = 0;
  for (const auto& r : results) {
    auto it = board.scores.find(r.model);
    if (it == board.scores.end())
      throw Error(ErrorCode::kUnknownModel, "model '" + r.model + "' is not in the candidate set");
    if (r.outcome == CandidateOutcome::Win) ++it->second;
  }
  return board;
}

// Rank 1 is the highest score; equal scores are ordered by model id.
inline ScoreBoard ranks_from_scores(ScoreBoard board, const RankPolicy& /*policy*/ = {}) {
  std::vector<std::pair<std::string, std::int64_t>> order(board.scores.begin(), board.scores.end());
  // std::map iteration is already ordered by id, so a stable sort on score
  // implements the ByModelId tie break.
  std::stable_sort(order.begin(), order.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  board.ranks.clear();
  for (std::size_t i = 0; i < order.size(); ++i) board.ranks[order[i].first] = static_cast<int>(i + 1);
  return board;
}

using VerdictMap = std::map<std::string, Verdict>;

// One judge's view of a benchmark: its leaderboard and per-task verdicts.
struct JudgeView {
  ScoreBoard board;
  VerdictMap verdicts;
};

inline MetricReport judger_score(const JudgeView& gt, const JudgeView& test,
                                 const RankPolicy& policy = {}) {
  if (gt.verdicts.size() != test.verdicts.size() ||
      !std::equal(gt.verdicts.begin(), gt.verdicts.end(), test.verdicts.begin(),
                  [](const auto& a, const auto& b) { return a.first == b.first; }))
    throw Error(ErrorCode::kCoverageMismatch, "ground-truth and test verdicts cover different tasks");
  if (gt.board.scores.size() != test.board.scores.size() ||
      !std::equal(gt.board.scores.begin(), gt.board.scores.end(), test.board.scores.begin(),
                  [](const auto& a, const auto& b) { return a.first == b.first; }))
    throw Error(ErrorCode::kCoverageMismatch, "ground-truth and test boards cover different models");
  if (gt.board.scores.size() < 2)
    throw Error(ErrorCode::kEmptyModelSet, "the metric needs at least 2 candidate models");
  if (gt.verdicts.empty()) throw Error(ErrorCode::kEmptyInput, "no samples to score");

  const ScoreBoard gt_board =
      gt.board.ranks.size() == gt.board.scores.size() ? gt.board : ranks_from_scores(gt.board, policy);
  const ScoreBoard test_board = test.board.ranks.size() == test.board.scores.size()
                                    ? test.board
                                    : ranks_from_scores(test.board, policy);

  MetricReport report;
  report.n_samples = static_cast<std::int64_t>(gt.verdicts.size());
  auto test_it = test.verdicts.begin();
  for (const auto& [id, v] : gt.verdicts) {
    // A test NoVerdict never equals a binary ground truth, so it counts as a
    // disagreement.
    if (v != Verdict::NoVerdict && v == test_it->second) ++report.n_agreements;
    ++test_it;
  }

  const double models = static_cast<double>(gt_board.scores.size());
  std::int64_t max_gap = 0;
  for (const auto& [m, s] : gt_board.scores)
    max_gap = std::max<std::int64_t>(max_gap, std::llabs(s - test_board.scores.at(m)));

  double rank_sum = 0.0;
  double score_sum = 0.0;
  for (const auto& [m, s] : gt_board.scores) {
    rank_sum += std::abs(gt_board.ranks.at(m) - test_board.ranks.at(m)) / (models - 1.0);
    if (max_gap > 0)
      score_sum += static_cast<double>(std::llabs(s - test_board.scores.at(m))) /
                   static_cast<double>(max_gap);
  }

  report.accuracy_term = 100.0 * static_cast<double>(report.n_agreements) /
                         static_cast<double>(report.n_samples);
  report.rank_penalty = (100.0 / models) * rank_sum;
  report.score_penalty = (100.0 / models) * score_sum;
  report.final_score = report.accuracy_term - report.rank_penalty - report.score_penalty;
  return report;
}

// A judged sample reduced to what the metric needs.
struct ScoredSample {
  std::string task_id;
  std::string candidate_model;
  std::string scenario;
  PositionAssignment position = PositionAssignment::CandidateIsA;
  Verdict verdict = Verdict::NoVerdict;
};

inline ScoredSample to_scored_sample(const JudgmentRecord& r) {
  return {r.task.id(), r.task.candidate_model, r.task.scenario, r.task.position_assignment, r.verdict};
}

inline std::vector<ScoredSample> to_scored_samples(std::span<const JudgmentRecord> records) {
  std::vector<ScoredSample> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(to_scored_sample(r));
  return out;
}

// Board + verdicts for one judge. NoVerdict samples keep their verdict entry
// but never contribute to a score.
inline JudgeView build_judge_view(std::span<const ScoredSample> samples,
                                  std::span<const std::string> models, const RankPolicy& policy = {}) {
  JudgeView view;
  std::vector<CandidateResult> results;
  results.reserve(samples.size());
  for (const auto& s : samples) {
    if (!view.verdicts.emplace(s.task_id, s.verdict).second)
      throw Error(ErrorCode::kInvalidArgument, "duplicate task '" + s.task_id + "'");
    if (s.verdict != Verdict::NoVerdict) results.push_back({s.candidate_model, unswap(s.verdict, s.position)});
    else if (std::find(models.begin(), models.end(), s.candidate_model) == models.end())
      throw Error(ErrorCode::kUnknownModel, "model '" + s.candidate_model + "' is not in the candidate set");
  }
  view.board = ranks_from_scores(accumulate_scores(results, models), policy);
  return view;
}

namespace detail {

// Drops ground-truth samples without a verdict and aligns the test samples
// with what remains.
inline std::pair<std::vector<ScoredSample>, std::vector<ScoredSample>> align_samples(
    std::span<const ScoredSample> gt, std::span<const ScoredSample> test) {
  std::map<std::string, const ScoredSample*> test_by_id;
  for (const auto& s : test) test_by_id.emplace(s.task_id, &s);
  std::vector<ScoredSample> gt_kept, test_kept;
  for (const auto& s : gt) {
    if (s.verdict == Verdict::NoVerdict) continue;
    auto it = test_by_id.find(s.task_id);
    if (it == test_by_id.end())
      throw Error(ErrorCode::kCoverageMismatch, "test judge has no verdict for task '" + s.task_id + "'");
    gt_kept.push_back(s);
    test_kept.push_back(*it->second);
  }
  return {std::move(gt_kept), std::move(test_kept)};
}

inline MetricReport score_aligned(std::span<const ScoredSample> gt, std::span<const ScoredSample> test,
                                  std::span<const std::string> models, const RankPolicy& policy) {
  return judger_score(build_judge_view(gt, models, policy), build_judge_view(test, models, policy), policy);
}

}  // namespace detail

// Per-scenario reports, each computed from scratch on that scenario's
// samples (ranks and the max score gap are renormalized per scenario).
// Samples without a scenario only count towards the global report.
inline std::map<std::string, MetricReport> per_scenario_breakdown(
    std::span<const ScoredSample> gt, std::span<const ScoredSample> test,
    std::span<const std::string> models, const RankPolicy& policy = {}) {
  auto [gt_kept, test_kept] = detail::align_samples(gt, test);
  std::map<std::string, std::pair<std::vector<ScoredSample>, std::vector<ScoredSample>>> groups;
  for (std::size_t i = 0; i < gt_kept.size(); ++i) {
    if (gt_kept[i].scenario.empty()) continue;
    auto& g = groups[gt_kept[i].scenario];
    g.first.push_back(gt_kept[i]);
    g.second.push_back(test_kept[i]);
  }
  std::map<std::string, MetricReport> out;
  for (const auto& [scenario, g] : groups) out[scenario] = detail::score_aligned(g.first, g.second, models, policy);
  return out;
}

// Global report plus per-scenario breakdown. Ground-truth samples without a
// verdict (no consensus) are removed from N.
inline MetricReport evaluate_judge(std::span<const ScoredSample> gt, std::span<const ScoredSample> test,
                                   std::span<const std::string> models, const RankPolicy& policy = {}) {
  auto [gt_kept, test_kept] = detail::align_samples(gt, test);
  MetricReport report = detail::score_aligned(gt_kept, test_kept, models, policy);
  report.per_scenario = per_scenario_breakdown(gt_kept, test_kept, models, policy);
  return report;
}

}  // namespace judgebench
