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

// Leaderboards, metric tables and run statistics in text, CSV and JSON.

#pragma once

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "judgebench/domain.hpp"
#include "judgebench/metrics.hpp"
#include "judgebench/orchestrator.hpp"

namespace judgebench {

struct RunStats {
  std::int64_t records = 0;
  std::int64_t cached = 0;
  std::int64_t no_verdict = 0;
  std::int64_t requests = 0;  // attempts summed over records served live
  std::int64_t position_pairs = 0;
  std::int64_t position_disagreements = 0;

  double cache_hit_rate() const { return records == 0 ? 0.0 : static_cast<double>(cached) / records; }
  double no_verdict_rate() const { return records == 0 ? 0.0 : static_cast<double>(no_verdict) / records; }
  double position_bias_rate() const {
    return position_pairs == 0 ? 0.0 : static_cast<double>(position_disagreements) / position_pairs;
  }
  bool operator==(const RunStats&) const = default;
};

inline RunStats compute_run_stats(std::span<const JudgmentRecord> records) {
  RunStats s;
  for (const auto& r : records) {
    ++s.records;
    if (r.cached) ++s.cached;
    else s.requests += r.attempts;
    if (r.verdict == Verdict::NoVerdict) ++s.no_verdict;
  }
  const PositionBias bias = position_bias(records);
  s.position_pairs = bias.pairs;
  s.position_disagreements = bias.disagreements;
  return s;
}

struct LeaderboardRow {
  int rank = 0;
  std::string model;
  std::int64_t score = 0;
  bool operator==(const LeaderboardRow&) const = default;
};

inline std::vector<LeaderboardRow> leaderboard(const ScoreBoard& board) {
  const ScoreBoard ranked = board.ranks.size() == board.scores.size() ? board : ranks_from_scores(board);
  std::vector<LeaderboardRow> rows;
  for (const auto& [model, score] : ranked.scores) rows.push_back({ranked.ranks.at(model), model, score});
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.rank < b.rank; });
  return rows;
}

struct ReportBundle {
  // judge id -> leaderboard, e.g. the ground truth and the judge under test.
  std::map<std::string, std::vector<LeaderboardRow>> leaderboards;
  std::string gt_judge;
  std::string test_judge;
  MetricReport metrics;
  RunStats run_stats;

  bool operator==(const ReportBundle&) const = default;
};

inline void to_json(json& j, const LeaderboardRow& r) {
  j = json{{"rank", r.rank}, {"model", r.model}, {"score", r.score}};
}
inline void from_json(const json& j, LeaderboardRow& r) {
  j.at("rank").get_to(r.rank);
  j.at("model").get_to(r.model);
  j.at("score").get_to(r.score);
}

inline void to_json(json& j, const RunStats& s) {
  j = json{{"records", s.records},
           {"cached", s.cached},
           {"no_verdict", s.no_verdict},
           {"requests", s.requests},
           {"position_pairs", s.position_pairs},
           {"position_disagreements", s.position_disagreements},
           {"cache_hit_rate", s.cache_hit_rate()},
           {"no_verdict_rate", s.no_verdict_rate()},
           {"position_bias_rate", s.position_bias_rate()}};
}
inline void from_json(const json& j, RunStats& s) {
  s.records = j.value("records", std::int64_t{0});
  s.cached = j.value("cached", std::int64_t{0});
  s.no_verdict = j.value("no_verdict", std::int64_t{0});
  s.requests = j.value("requests", std::int64_t{0});
  s.position_pairs = j.value("position_pairs", std::int64_t{0});
  s.position_disagreements = j.value("position_disagreements", std::int64_t{0});
}

inline void to_json(json& j, const ReportBundle& b) {
  j = json{{"leaderboards", b.leaderboards}, {"gt_judge", b.gt_judge}, {"test_judge", b.test_judge},
           {"metrics", b.metrics},           {"run_stats", b.run_stats}};
}
inline void from_json(const json& j, ReportBundle& b) {
  j.at("leaderboards").get_to(b.leaderboards);
  b.gt_judge = j.value("gt_judge", std::string{});
  b.test_judge = j.value("test_judge", std::string{});
  j.at("metrics").get_to(b.metrics);
  b.run_stats = j.value("run_stats", RunStats{});
}

inline std::string fixed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

// Shortest text that parses back to the same double.
inline std::string full_precision(double v) {
  char buf[64];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

namespace detail {

inline std::string pad(std::string s, std::size_t width, bool left = true) {
  if (s.size() >= width) return s;
  return left ? s + std::string(width - s.size(), ' ') : std::string(width - s.size(), ' ') + s;
}

inline std::vector<std::pair<std::string, const MetricReport*>> metric_rows(const MetricReport& m) {
  std::vector<std::pair<std::string, const MetricReport*>> rows{{"overall", &m}};
  for (const auto& [name, sub] : m.per_scenario) rows.emplace_back(name, &sub);
  return rows;
}

}  // namespace detail

inline std::string render_table_text(const ReportBundle& b) {
  std::ostringstream out;
  out << "Judge: " << (b.test_judge.empty() ? "-" : b.test_judge)
      << "    Ground truth: " << (b.gt_judge.empty() ? "-" : b.gt_judge) << "\n\n";

  const auto rows = detail::metric_rows(b.metrics);
  std::size_t scope_w = 8;
  for (const auto& [name, m] : rows) scope_w = std::max(scope_w, name.size() + 2);
  out << detail::pad("Scope", scope_w) << detail::pad("N", 8, false) << detail::pad("C", 8, false)
      << detail::pad("Accuracy", 11, false) << detail::pad("RankPen", 10, false) << detail::pad("ScorePen", 10, false)
      << detail::pad("Final", 10, false) << "\n";
  for (const auto& [name, m] : rows) {
    out << detail::pad(name, scope_w) << detail::pad(std::to_string(m->n_samples), 8, false)
        << detail::pad(std::to_string(m->n_agreements), 8, false) << detail::pad(fixed2(m->accuracy_term), 11, false)
        << detail::pad(fixed2(m->rank_penalty), 10, false) << detail::pad(fixed2(m->score_penalty), 10, false)
        << detail::pad(fixed2(m->final_score), 10, false) << "\n";
  }

  for (const auto& [judge, board] : b.leaderboards) {
    out << "\nLeaderboard (" << judge << ")\n";
    std::size_t model_w = 8;
    for (const auto& r : board) model_w = std::max(model_w, r.model.size() + 2);
    out << detail::pad("Rank", 6) << detail::pad("Model", model_w) << detail::pad("Wins", 8, false) << "\n";
    for (const auto& r : board)
      out << detail::pad(std::to_string(r.rank), 6) << detail::pad(r.model, model_w)
          << detail::pad(std::to_string(r.score), 8, false) << "\n";
  }

  const RunStats& s = b.run_stats;
  out << "\nRun statistics\n"
      << "  records            " << s.records << "\n"
      << "  requests           " << s.requests << "\n"
      << "  cache hit rate     " << fixed2(100.0 * s.cache_hit_rate()) << "%\n"
      << "  no-verdict rate    " << fixed2(100.0 * s.no_verdict_rate()) << "%\n"
      << "  position bias      " << fixed2(100.0 * s.position_bias_rate()) << "% of " << s.position_pairs
      << " swapped pairs\n";
  return out.str();
}

// Metric rows at full precision so they parse back to the structured values.
inline std::string render_metrics_csv(const ReportBundle& b) {
  std::ostringstream out;
  out << "scope,n_samples,n_agreements,accuracy_term,rank_penalty,score_penalty,final_score\n";
  for (const auto& [name, m] : detail::metric_rows(b.metrics))
    out << name << ',' << m->n_samples << ',' << m->n_agreements << ',' << full_precision(m->accuracy_term) << ','
        << full_precision(m->rank_penalty) << ',' << full_precision(m->score_penalty) << ','
        << full_precision(m->final_score) << '\n';
  return out.str();
}

inline std::string render_leaderboard_csv(const ReportBundle& b) {
  std::ostringstream out;
  out << "judge,rank,model,score\n";
  for (const auto& [judge, board] : b.leaderboards)
    for (const auto& r : board) out << judge << ',' << r.rank << ',' << r.model << ',' << r.score << '\n';
  return out.str();
}

enum class ReportFormat { TableText, Csv, Structured };

inline ReportFormat report_format_from_string(std::string_view s) {
  if (s == "table" || s == "table-text" || s == "text") return ReportFormat::TableText;
  if (s == "csv") return ReportFormat::Csv;
  if (s == "json" || s == "structured") return ReportFormat::Structured;
  throw Error(ErrorCode::kInvalidArgument, "unknown report format '" + std::string(s) + "'");
}

namespace detail {

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot open for writing", path.string());
  out << text;
  if (!out) throw Error(ErrorCode::kIoFailure, "write failed", path.string());
}

}  // namespace detail

// Writes report.txt, report.csv (+ leaderboard.csv) and/or report.json into
// `out_dir`; returns the files written.
inline std::vector<std::filesystem::path> generate_report(const ReportBundle& b, const std::set<ReportFormat>& formats,
                                                          const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::kIoFailure, ec.message(), out_dir.string());
  std::vector<std::filesystem::path> written;
  for (ReportFormat f : formats) {
    switch (f) {
      case ReportFormat::TableText:
        detail::write_text(out_dir / "report.txt", render_table_text(b));
        written.push_back(out_dir / "report.txt");
        break;
      case ReportFormat::Csv:
        detail::write_text(out_dir / "report.csv", render_metrics_csv(b));
        detail::write_text(out_dir / "leaderboard.csv", render_leaderboard_csv(b));
        written.push_back(out_dir / "report.csv");
        written.push_back(out_dir / "leaderboard.csv");
        break;
      case ReportFormat::Structured:
        detail::write_text(out_dir / "report.json", json(b).dump(2) + "\n");
        written.push_back(out_dir / "report.json");
        break;
    }
  }
  return written;
}

// Scores a test judge against ground-truth records and assembles the bundle.
inline ReportBundle build_report_bundle(std::span<const JudgmentRecord> gt_records,
                                        std::span<const JudgmentRecord> test_records,
                                        std::span<const std::string> models, std::span<const JudgmentRecord> run_records,
                                        const RankPolicy& policy = {}) {
  const auto gt = to_scored_samples(gt_records);
  const auto test = to_scored_samples(test_records);
  ReportBundle b;
  b.gt_judge = gt_records.empty() ? std::string() : gt_records.front().judge_id;
  b.test_judge = test_records.empty() ? std::string() : test_records.front().judge_id;
  b.metrics = evaluate_judge(gt, test, models, policy);

  // Leaderboards over the scored (consensus-included) tasks only.
  std::set<std::string> kept;
  for (const auto& s : gt)
    if (s.verdict != Verdict::NoVerdict) kept.insert(s.task_id);
  std::vector<ScoredSample> gt_kept, test_kept;
  for (const auto& s : gt)
    if (kept.count(s.task_id)) gt_kept.push_back(s);
  for (const auto& s : test)
    if (kept.count(s.task_id)) test_kept.push_back(s);
  b.leaderboards[b.gt_judge.empty() ? "gt" : b.gt_judge] = leaderboard(build_judge_view(gt_kept, models, policy).board);
  b.leaderboards[b.test_judge.empty() ? "test" : b.test_judge] =
      leaderboard(build_judge_view(test_kept, models, policy).board);
  b.run_stats = compute_run_stats(run_records);
  return b;
}

}  // namespace judgebench
