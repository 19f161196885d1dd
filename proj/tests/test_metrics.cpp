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

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "judgebench/metrics.hpp"
#include "metric_oracle.hpp"
#include "test_support.hpp"

namespace jb = judgebench;
using jb::CandidateOutcome;
using jb::PositionAssignment;
using jb::Verdict;

namespace {

jb::JudgeView view(std::map<std::string, std::int64_t> scores, std::vector<Verdict> verdicts) {
  jb::JudgeView v;
  v.board.scores = std::move(scores);
  for (std::size_t i = 0; i < verdicts.size(); ++i) v.verdicts["t" + std::to_string(i)] = verdicts[i];
  return v;
}

}  // namespace

TEST(Unswap, Examples) {
  EXPECT_EQ(jb::unswap(Verdict::AWins, PositionAssignment::CandidateIsA), CandidateOutcome::Win);
  EXPECT_EQ(jb::unswap(Verdict::AWins, PositionAssignment::CandidateIsB), CandidateOutcome::Loss);
  EXPECT_EQ(jb::unswap(Verdict::BWins, PositionAssignment::CandidateIsB), CandidateOutcome::Win);
  EXPECT_EQ(jb::unswap(Verdict::Tie, PositionAssignment::CandidateIsA), CandidateOutcome::Tie);
  EXPECT_EQ(jb::unswap(Verdict::Tie, PositionAssignment::CandidateIsB), CandidateOutcome::Tie);
  EXPECT_THROW(jb::unswap(Verdict::NoVerdict, PositionAssignment::CandidateIsA), jb::Error);
}

TEST(AccumulateScores, Examples) {
  const std::vector<std::string> models = {"m1", "m2"};
  const std::vector<jb::CandidateResult> rs = {{"m1", CandidateOutcome::Win},
                                               {"m1", CandidateOutcome::Win},
                                               {"m1", CandidateOutcome::Loss},
                                               {"m2", CandidateOutcome::Win}};
  const auto b = jb::accumulate_scores(rs, models);
  EXPECT_EQ(b.scores, (std::map<std::string, std::int64_t>{{"m1", 2}, {"m2", 1}}));
  EXPECT_EQ(jb::accumulate_scores({}, models).scores,
            (std::map<std::string, std::int64_t>{{"m1", 0}, {"m2", 0}}));
  const std::vector<jb::CandidateResult> stranger = {{"m9", CandidateOutcome::Win}};
  EXPECT_THROW(jb::accumulate_scores(stranger, models), jb::Error);
}

TEST(AccumulateScores, MatchesRecount) {
  std::mt19937_64 rng(17);
  const auto models = jb::testing::model_names(10);
  std::vector<jb::CandidateResult> rs;
  std::map<std::string, std::int64_t> expected;
  for (std::size_t m = 0; m < models.size(); ++m) {
    std::bernoulli_distribution win(0.05 + 0.09 * static_cast<double>(m));
    for (int i = 0; i < 100; ++i) {
      const bool w = win(rng);
      rs.push_back({models[m], w ? CandidateOutcome::Win : CandidateOutcome::Loss});
      expected[models[m]] += w ? 1 : 0;
    }
  }
  EXPECT_EQ(jb::accumulate_scores(rs, models).scores, expected);
}

TEST(RanksFromScores, TieBreakByModelId) {
  jb::ScoreBoard b;
  b.scores = {{"a", 5}, {"b", 3}, {"c", 3}};
  EXPECT_EQ(jb::ranks_from_scores(b).ranks, (std::map<std::string, int>{{"a", 1}, {"b", 2}, {"c", 3}}));
  b.scores = {{"z", 1}, {"y", 1}, {"x", 1}};
  EXPECT_EQ(jb::ranks_from_scores(b).ranks, (std::map<std::string, int>{{"x", 1}, {"y", 2}, {"z", 3}}));
}

TEST(RanksFromScores, PermutationConsistentWithScores) {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 500; ++i) {
    jb::ScoreBoard b;
    for (const auto& m : jb::testing::model_names(10)) b.scores[m] = static_cast<std::int64_t>(rng() % 6);
    const auto r = jb::ranks_from_scores(b).ranks;
    std::vector<int> seen;
    for (const auto& [m, rank] : r) seen.push_back(rank);
    std::sort(seen.begin(), seen.end());
    for (int k = 0; k < 10; ++k) ASSERT_EQ(seen[static_cast<std::size_t>(k)], k + 1);
    for (const auto& [m1, r1] : r)
      for (const auto& [m2, r2] : r)
        if (b.scores[m1] > b.scores[m2]) {
          ASSERT_LT(r1, r2);
        }
  }
}

TEST(JudgerScore, IdentityScoresHundred) {
  const auto v = view({{"a", 3}, {"b", 1}}, {Verdict::AWins, Verdict::BWins, Verdict::AWins});
  const auto r = jb::judger_score(v, v);
  EXPECT_EQ(r.final_score, 100.0);
  EXPECT_EQ(r.score_penalty, 0.0);
  EXPECT_EQ(r.rank_penalty, 0.0);
}

TEST(JudgerScore, HandComputedNegativeScore) {
  const auto gt = view({{"a", 2}, {"b", 1}}, {Verdict::AWins, Verdict::AWins, Verdict::AWins, Verdict::AWins});
  const auto test = view({{"a", 1}, {"b", 2}}, {Verdict::AWins, Verdict::BWins, Verdict::BWins, Verdict::BWins});
  const auto r = jb::judger_score(gt, test);
  EXPECT_EQ(r.n_agreements, 1);
  EXPECT_DOUBLE_EQ(r.accuracy_term, 25.0);
  EXPECT_DOUBLE_EQ(r.rank_penalty, 100.0);
  EXPECT_DOUBLE_EQ(r.score_penalty, 100.0);
  EXPECT_DOUBLE_EQ(r.final_score, -175.0);
}

TEST(JudgerScore, Errors) {
  const auto gt = view({{"a", 1}, {"b", 1}}, {Verdict::AWins, Verdict::AWins});
  auto other = view({{"a", 1}, {"b", 1}}, {Verdict::AWins});
  try {
    jb::judger_score(gt, other);
    FAIL();
  } catch (const jb::Error& e) {
    EXPECT_EQ(e.code(), jb::ErrorCode::kCoverageMismatch);
  }
  other = view({{"a", 1}, {"c", 1}}, {Verdict::AWins, Verdict::AWins});
  EXPECT_THROW(jb::judger_score(gt, other), jb::Error);
  const auto single = view({{"a", 1}}, {Verdict::AWins});
  try {
    jb::judger_score(single, single);
    FAIL();
  } catch (const jb::Error& e) {
    EXPECT_EQ(e.code(), jb::ErrorCode::kEmptyModelSet);
  }
}

TEST(JudgerScoreProperty, OracleBoundsAndDecomposition) {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 1000; ++i) {
    std::size_t n_models = 0;
    const auto xs = jb::testing::random_instance(rng, n_models);
    const auto r = jb::testing::library_score(xs, n_models);
    const auto o = jb::testing::metric_oracle(xs, n_models);
    ASSERT_NEAR(r.accuracy_term, o.accuracy, 1e-9);
    ASSERT_NEAR(r.rank_penalty, o.rank_penalty, 1e-9);
    ASSERT_NEAR(r.score_penalty, o.score_penalty, 1e-9);
    ASSERT_NEAR(r.final_score, o.final_score, 1e-9);
    ASSERT_EQ(r.final_score, r.accuracy_term - r.rank_penalty - r.score_penalty);
    ASSERT_GE(r.accuracy_term, 0.0);
    ASSERT_LE(r.accuracy_term, 100.0);
    ASSERT_GE(r.rank_penalty, 0.0);
    ASSERT_LE(r.rank_penalty, 100.0);
    ASSERT_GE(r.score_penalty, 0.0);
    ASSERT_LE(r.final_score, 100.0);

    // Identity: the ground truth scored against itself.
    auto same = xs;
    for (auto& x : same) x.test = x.gt;
    ASSERT_EQ(jb::testing::library_score(same, n_models).final_score, 100.0);
  }
}

TEST(JudgerScoreProperty, ScorePenaltyInvariantToUniformGapScaling) {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 500; ++i) {
    const auto models = jb::testing::model_names(2 + rng() % 4);
    jb::JudgeView gt, test, test2;
    gt.verdicts = test.verdicts = test2.verdicts = {{"t", Verdict::AWins}};
    for (const auto& m : models) {
      const std::int64_t s1 = static_cast<std::int64_t>(rng() % 50);
      const std::int64_t gap = static_cast<std::int64_t>(rng() % 11) - 5;
      gt.board.scores[m] = s1 + 20;
      test.board.scores[m] = s1 + 20 + gap;
      test2.board.scores[m] = s1 + 20 + 2 * gap;
    }
    // Hold ranks fixed so only the score term can move.
    gt.board = jb::ranks_from_scores(gt.board);
    test.board.ranks = test2.board.ranks = gt.board.ranks;
    ASSERT_NEAR(jb::judger_score(gt, test).score_penalty, jb::judger_score(gt, test2).score_penalty, 1e-12);
  }
}

TEST(JudgerScore, DecompositionFixture) {
  const auto xs = jb::testing::decomposition_fixture();
  const auto r = jb::testing::library_score(xs, 10);
  EXPECT_EQ(r.n_samples, 10000);
  EXPECT_EQ(r.n_agreements, 7804);
  EXPECT_DOUBLE_EQ(r.accuracy_term, 78.04);
  EXPECT_EQ(r.rank_penalty, 0.0);
  EXPECT_NEAR(r.score_penalty, 17.52, 1e-12);
  EXPECT_NEAR(r.final_score, 60.52, 1e-9);
}

TEST(EvaluateJudge, NoConsensusSamplesLeaveN) {
  const std::vector<std::string> models = {"m0", "m1"};
  std::vector<jb::ScoredSample> gt = {{"t1", "m0", "s", PositionAssignment::CandidateIsA, Verdict::AWins},
                                      {"t2", "m1", "s", PositionAssignment::CandidateIsA, Verdict::NoVerdict},
                                      {"t3", "m1", "s", PositionAssignment::CandidateIsA, Verdict::BWins}};
  std::vector<jb::ScoredSample> test = gt;
  test[1].verdict = Verdict::AWins;
  const auto r = jb::evaluate_judge(gt, test, models);
  EXPECT_EQ(r.n_samples, 2);
  EXPECT_EQ(r.final_score, 100.0);
}

TEST(EvaluateJudge, MissingTestTaskIsCoverageMismatch) {
  const std::vector<std::string> models = {"m0", "m1"};
  std::vector<jb::ScoredSample> gt = {{"t1", "m0", "s", PositionAssignment::CandidateIsA, Verdict::AWins}};
  try {
    jb::evaluate_judge(gt, {}, models);
    FAIL();
  } catch (const jb::Error& e) {
    EXPECT_EQ(e.code(), jb::ErrorCode::kCoverageMismatch);
  }
}

TEST(PerScenario, SingleScenarioEqualsGlobal) {
  std::mt19937_64 rng(8);
  std::size_t n_models = 0;
  const auto xs = jb::testing::random_instance(rng, n_models);
  const auto models = jb::testing::oracle_models(n_models);
  const auto gt = jb::testing::to_scored(xs, false);
  const auto test = jb::testing::to_scored(xs, true);
  auto r = jb::evaluate_judge(gt, test, models);
  ASSERT_EQ(r.per_scenario.size(), 1u);
  auto only = r.per_scenario.begin()->second;
  r.per_scenario.clear();
  EXPECT_EQ(only, r);
}

TEST(PerScenario, AgreementsAddUpAndMatchOracle) {
  std::mt19937_64 rng(41);
  const std::size_t kModels = 10, kScenarios = 10, kQueries = 100;
  std::vector<jb::ScoredSample> gt, test;
  std::map<std::string, std::vector<jb::testing::OracleSample>> by_scenario;
  for (std::size_t s = 0; s < kScenarios; ++s) {
    const std::string scenario = "sc" + std::to_string(s);
    for (std::size_t q = 0; q < kQueries; ++q)
      for (std::size_t m = 0; m < kModels; ++m) {
        jb::testing::OracleSample x;
        x.task_id = scenario + "/q" + std::to_string(q) + "/m" + std::to_string(m);
        x.model = m;
        x.candidate_is_a = rng() & 1;
        x.gt = (rng() & 1) ? Verdict::AWins : Verdict::BWins;
        x.test = (rng() % 4 == 0) ? ((rng() & 1) ? Verdict::AWins : Verdict::BWins) : x.gt;
        by_scenario[scenario].push_back(x);
        const auto pos = x.candidate_is_a ? PositionAssignment::CandidateIsA : PositionAssignment::CandidateIsB;
        gt.push_back({x.task_id, "m" + std::to_string(m), scenario, pos, x.gt});
        test.push_back({x.task_id, "m" + std::to_string(m), scenario, pos, x.test});
      }
  }
  const auto r = jb::evaluate_judge(gt, test, jb::testing::oracle_models(kModels));
  ASSERT_EQ(r.per_scenario.size(), kScenarios);
  std::int64_t c = 0;
  for (const auto& [scenario, sub] : r.per_scenario) {
    c += sub.n_agreements;
    const auto o = jb::testing::metric_oracle(by_scenario[scenario], kModels);
    EXPECT_NEAR(sub.final_score, o.final_score, 1e-9) << scenario;
    EXPECT_NEAR(sub.rank_penalty, o.rank_penalty, 1e-9) << scenario;
  }
  EXPECT_EQ(c, r.n_agreements);
}
