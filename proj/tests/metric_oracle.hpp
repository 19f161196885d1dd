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

// Direct-summation reference for the judge metric, written without any of the
// library's board or rank helpers. Used by the unit and acceptance tests.

#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "judgebench/metrics.hpp"

namespace judgebench::testing {

struct OracleSample {
  std::string task_id;
  std::size_t model = 0;  // index into the model list
  bool candidate_is_a = true;
  Verdict gt = Verdict::AWins;
  Verdict test = Verdict::AWins;
};

struct OracleResult {
  double accuracy = 0, rank_penalty = 0, score_penalty = 0, final_score = 0;
};

inline OracleResult metric_oracle(const std::vector<OracleSample>& samples, std::size_t n_models) {
  auto wins = [](Verdict v, bool a) {
    return (v == Verdict::AWins && a) || (v == Verdict::BWins && !a);
  };
  std::vector<long> s1(n_models, 0), s2(n_models, 0);
  long agree = 0;
  for (const auto& x : samples) {
    if (wins(x.gt, x.candidate_is_a)) s1[x.model] += 1;
    if (wins(x.test, x.candidate_is_a)) s2[x.model] += 1;
    if (x.gt == x.test && x.gt != Verdict::NoVerdict) agree += 1;
  }
  // Rank = 1 + number of models ahead; ties go to the lexicographically
  // smaller name, and names are "m<index>" with index < 10 in all fixtures.
  auto rank = [&](const std::vector<long>& s, std::size_t m) {
    int r = 1;
    for (std::size_t o = 0; o < n_models; ++o)
      if (s[o] > s[m] || (s[o] == s[m] && o < m)) r += 1;
    return r;
  };
  long max_gap = 0;
  for (std::size_t m = 0; m < n_models; ++m) max_gap = std::max(max_gap, std::labs(s1[m] - s2[m]));

  const double M = static_cast<double>(n_models);
  OracleResult out;
  out.accuracy = 100.0 * static_cast<double>(agree) / static_cast<double>(samples.size());
  for (std::size_t m = 0; m < n_models; ++m) {
    out.rank_penalty += (100.0 / M) * std::abs(rank(s1, m) - rank(s2, m)) / (M - 1.0);
    if (max_gap != 0)
      out.score_penalty += (100.0 / M) * static_cast<double>(std::labs(s1[m] - s2[m])) / static_cast<double>(max_gap);
  }
  out.final_score = out.accuracy - out.rank_penalty - out.score_penalty;
  return out;
}

// Random instance: |M| in [2,5], N in [4,50], binary ground truth and a test
// judge that may also fail to answer.
inline std::vector<OracleSample> random_instance(std::mt19937_64& rng, std::size_t& n_models) {
  n_models = std::uniform_int_distribution<std::size_t>(2, 5)(rng);
  const std::size_t n = std::uniform_int_distribution<std::size_t>(4, 50)(rng);
  std::uniform_int_distribution<std::size_t> model(0, n_models - 1);
  std::uniform_int_distribution<int> three(0, 2);
  std::vector<OracleSample> out;
  for (std::size_t i = 0; i < n; ++i) {
    OracleSample x;
    x.task_id = "t" + std::to_string(i);
    x.model = model(rng);
    x.candidate_is_a = rng() & 1;
    x.gt = (rng() & 1) ? Verdict::AWins : Verdict::BWins;
    const int t = three(rng);
    x.test = t == 0 ? Verdict::AWins : t == 1 ? Verdict::BWins : Verdict::NoVerdict;
    out.push_back(x);
  }
  return out;
}

inline std::vector<ScoredSample> to_scored(const std::vector<OracleSample>& xs, bool test) {
  std::vector<ScoredSample> out;
  for (const auto& x : xs)
    out.push_back({x.task_id, "m" + std::to_string(x.model), "s",
                   x.candidate_is_a ? PositionAssignment::CandidateIsA : PositionAssignment::CandidateIsB,
                   test ? x.test : x.gt});
  return out;
}

inline std::vector<std::string> oracle_models(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back("m" + std::to_string(i));
  return out;
}

// Library path: boards from samples, then the metric.
inline MetricReport library_score(const std::vector<OracleSample>& xs, std::size_t n_models) {
  const auto models = oracle_models(n_models);
  const auto gt = to_scored(xs, false);
  const auto test = to_scored(xs, true);
  return judger_score(build_judge_view(gt, models), build_judge_view(test, models));
}


// Ten models with 1,000 tasks each (candidate always shown as A). Ground-truth
// wins are 400..480 for m0..m8 and 1,000 for m9; the test judge gives m9 750
// and m8 668, so both leaderboards keep the same order. Beyond those 438
// disagreements, 879 win/loss swaps inside m0..m8 leave every score unchanged
// while adding 1,758 more, for C = 10,000 - 2,196 = 7,804.
//   accuracy = 78.04, rank penalty = 0, score penalty = 10 * (250 + 188) / 250 = 17.52
inline std::vector<OracleSample> decomposition_fixture() {
  constexpr std::size_t kModels = 10, kTasks = 1000;
  const std::vector<int> gt_wins = {400, 410, 420, 430, 440, 450, 460, 470, 480, 1000};
  const std::vector<int> swaps = {98, 98, 98, 98, 98, 98, 98, 98, 95, 0};
  std::vector<OracleSample> out;
  out.reserve(kModels * kTasks);
  for (std::size_t m = 0; m < kModels; ++m) {
    const int wins = gt_wins[m];
    int promote = m == 8 ? 188 : 0;  // GT losses the test judge calls wins
    int demote = m == 9 ? 250 : 0;   // GT wins the test judge calls losses
    int swap_win = swaps[m], swap_loss = swaps[m];
    for (std::size_t t = 0; t < kTasks; ++t) {
      OracleSample x;
      x.task_id = "q" + std::to_string(t) + "/m" + std::to_string(m) + "/A";
      x.model = m;
      x.candidate_is_a = true;
      const bool gt_win = static_cast<int>(t) < wins;
      x.gt = gt_win ? Verdict::AWins : Verdict::BWins;
      bool test_win = gt_win;
      if (gt_win && demote > 0) {
        test_win = false;
        --demote;
      } else if (gt_win && swap_win > 0) {
        test_win = false;
        --swap_win;
      } else if (!gt_win && promote > 0) {
        test_win = true;
        --promote;
      } else if (!gt_win && swap_loss > 0) {
        test_win = true;
        --swap_loss;
      }
      x.test = test_win ? Verdict::AWins : Verdict::BWins;
      out.push_back(std::move(x));
    }
  }
  return out;
}

// Records for either judge of an oracle instance, e.g. to feed the report path.
inline std::vector<JudgmentRecord> to_records(const std::vector<OracleSample>& xs, bool test,
                                              const std::string& judge_id) {
  std::vector<JudgmentRecord> out;
  out.reserve(xs.size());
  for (const auto& x : xs) {
    JudgmentRecord r;
    const auto slash = x.task_id.find('/');
    r.task.query_id = x.task_id.substr(0, slash);
    r.task.scenario = "s";
    r.task.candidate_model = "m" + std::to_string(x.model);
    r.task.position_assignment = x.candidate_is_a ? PositionAssignment::CandidateIsA : PositionAssignment::CandidateIsB;
    r.judge_id = judge_id;
    r.verdict = test ? x.test : x.gt;
    r.attempts = 1;
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace judgebench::testing
