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

// Subcommand dispatch for the judgebench tool. Every failure is reported as a
// single JSON line on the error stream: {"error": <code>, "message", "path"}.

#pragma once

#include <csignal>
#include <fstream>
#include <iostream>
#include <map>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "judgebench/consensus.hpp"
#include "judgebench/curation.hpp"
#include "judgebench/domain.hpp"
#include "judgebench/losses.hpp"
#include "judgebench/orchestrator.hpp"
#include "judgebench/records.hpp"
#include "judgebench/report.hpp"
#include "judgebench/stub_server.hpp"

namespace judgebench {

inline constexpr const char* kUsage =
    "usage: judgebench <command> [flags]\n"
    "\n"
    "commands:\n"
    "  run-eval    judge every (query, candidate) pair with the configured judges\n"
    "  consensus   majority vote over ground-truth judge records\n"
    "  score       score a test judge against ground truth\n"
    "  report      render a score bundle as text, csv or json\n"
    "  curate      render judge prompts for labelled preference pairs\n"
    "  sample      rejection-sample judgments for curated prompts\n"
    "  emit        write SFT or RFT training lines from sampled records\n"
    "  loss-check  finite-difference check of the loss gradients\n"
    "  stub-serve  run the local stub endpoint until interrupted\n"
    "\n"
    "Run 'judgebench <command> --help' for the flags of a command.\n";

namespace cli {

inline json load_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot open for reading", path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return json::parse(ss.str());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseFailure, e.what(), path);
  }
}

inline RunConfig load_config(const std::string& path) { return validate_run_config(load_json_file(path)); }

inline void write_json_file(const std::string& path, const json& doc) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot open for writing", path);
  out << doc.dump(2) << '\n';
}

inline std::vector<JudgmentRecord> read_all_records(const std::vector<std::string>& paths) {
  std::vector<JudgmentRecord> all;
  for (const auto& p : paths) {
    auto part = read_records<JudgmentRecord>(p);
    all.insert(all.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  }
  return all;
}

inline std::vector<JudgmentRecord> keep_judges(std::vector<JudgmentRecord> records, const std::vector<std::string>& ids) {
  if (ids.empty()) return records;
  const std::set<std::string> keep(ids.begin(), ids.end());
  std::erase_if(records, [&](const JudgmentRecord& r) { return !keep.count(r.judge_id); });
  return records;
}

inline std::set<std::string> judge_ids(const std::vector<JudgmentRecord>& records) {
  std::set<std::string> ids;
  for (const auto& r : records) ids.insert(r.judge_id);
  return ids;
}

// --- run-eval -------------------------------------------------------------

struct RunEvalArgs {
  std::string config, dataset, out;
  std::vector<std::string> judges;
  bool dry_run = false;
};

inline int run_eval(const RunEvalArgs& a, std::ostream& out) {
  RunConfig config = load_config(a.config);
  const auto dataset = read_records<DatasetItem>(a.dataset);
  JudgePlan plan = plan_comparisons(dataset, config);
  if (!a.judges.empty()) {
    for (const auto& id : a.judges)
      if (!config.find_judge(id)) throw Error(ErrorCode::kInvalidEndpoint, "no endpoint configured for judge", id);
    plan.judges = a.judges;
  }
  if (a.dry_run) {
    const auto total = static_cast<std::int64_t>(plan.tasks.size() * plan.judges.size());
    out << json{{"dry_run", true},
                {"queries", dataset.size()},
                {"candidates", config.candidates.size()},
                {"tasks_per_judge", plan.tasks.size()},
                {"judges", plan.judges},
                {"judgments", total},
                {"max_requests", total * config.max_attempts},
                {"request_budget", config.request_budget}}
               .dump()
        << '\n';
    return 0;
  }
  if (a.out.empty()) throw Error(ErrorCode::kInvalidFlags, "--out is required unless --dry-run is given");
  const ExecutionResult result = execute(plan, config);
  write_records(a.out, result.records);
  out << json{{"records", result.records.size()},
              {"requests", result.stats.requests},
              {"cache_hits", result.stats.cache_hits},
              {"retries", result.stats.retries},
              {"failures", result.stats.failures},
              {"out", a.out}}
             .dump()
      << '\n';
  return 0;
}

// --- consensus ------------------------------------------------------------

struct ConsensusArgs {
  std::vector<std::string> records, judges;
  std::string out, excluded, id = "moj";
};

inline int consensus(const ConsensusArgs& a, std::ostream& out) {
  const auto records = keep_judges(read_all_records(a.records), a.judges);
  if (records.empty()) throw Error(ErrorCode::kEmptyInput, "no ground-truth records", a.records.front());
  const ConsensusOutput c = consensus_from_records(records, a.id);
  write_records(a.out, c.records);
  const std::string excluded_path = a.excluded.empty() ? a.out + ".excluded.jsonl" : a.excluded;
  const auto lines = exclusion_lines(c.ground_truth);
  write_json_lines(excluded_path, lines);
  out << json{{"samples", c.ground_truth.results.size()},
              {"included", c.ground_truth.included_count()},
              {"excluded", c.ground_truth.excluded.size()},
              {"judges", judge_ids(records)},
              {"out", a.out},
              {"excluded_out", excluded_path}}
             .dump()
      << '\n';
  return 0;
}

// --- score ----------------------------------------------------------------

struct ScoreArgs {
  std::string gt, test, config, out, test_judge;
  std::vector<std::string> candidates;
  std::vector<std::string> run_records;
};

inline int score(const ScoreArgs& a, std::ostream& out) {
  auto gt = read_records<JudgmentRecord>(a.gt);
  // Several ground-truth judges in one file are voted into a consensus first.
  if (judge_ids(gt).size() > 1) gt = consensus_from_records(gt).records;

  auto test = read_records<JudgmentRecord>(a.test);
  if (!a.test_judge.empty()) test = keep_judges(std::move(test), {a.test_judge});
  if (judge_ids(test).size() > 1)
    throw Error(ErrorCode::kInvalidFlags, "test records hold several judges; pick one with --test-judge", a.test);

  std::vector<std::string> models = a.candidates;
  if (models.empty() && !a.config.empty()) models = load_config(a.config).candidates;
  if (models.empty()) {
    std::set<std::string> seen;
    for (const auto& r : gt) seen.insert(r.task.candidate_model);
    models.assign(seen.begin(), seen.end());
  }

  const auto run = a.run_records.empty() ? test : read_all_records(a.run_records);
  const ReportBundle bundle = build_report_bundle(gt, test, models, run);
  const std::string out_path = a.out.empty() ? "score.json" : a.out;
  write_json_file(out_path, bundle);
  out << render_table_text(bundle);
  return 0;
}

// --- report ---------------------------------------------------------------

struct ReportArgs {
  std::string score, out_dir = "report";
  std::vector<std::string> formats{"table", "csv", "json"};
  std::vector<std::string> run_records;
};

inline int report(const ReportArgs& a, std::ostream& out) {
  ReportBundle bundle;
  try {
    bundle = load_json_file(a.score).get<ReportBundle>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseFailure, e.what(), a.score);
  }
  if (!a.run_records.empty()) bundle.run_stats = compute_run_stats(read_all_records(a.run_records));
  std::set<ReportFormat> formats;
  for (const auto& f : a.formats) formats.insert(report_format_from_string(f));
  for (const auto& path : generate_report(bundle, formats, a.out_dir)) out << path.string() << '\n';
  return 0;
}

// --- curate ---------------------------------------------------------------

struct CurateArgs {
  std::string input, out, mode = "verify", directive;
};

inline int curate(const CurateArgs& a, std::ostream& out) {
  CurationMode mode;
  if (a.mode == "verify") mode = CurationMode::VerifyGroundTruth;
  else if (a.mode == "style") mode = CurationMode::StylePair;
  else throw Error(ErrorCode::kInvalidFlags, "--mode must be 'verify' or 'style'", a.mode);
  const std::string directive = a.directive.empty() ? std::string(kDetailPreferenceDirective) : a.directive;

  const auto items = read_records<CurationItem>(a.input);
  std::vector<PromptRecord> prompts;
  prompts.reserve(items.size());
  for (const auto& item : items) prompts.push_back(make_prompt_record(item, mode, directive));
  write_records(a.out, prompts);
  out << json{{"prompts", prompts.size()}, {"out", a.out}}.dump() << '\n';
  return 0;
}

// --- sample ---------------------------------------------------------------

struct SampleArgs {
  std::string config, prompts, judge, out;
  std::size_t m = 8;
  double temperature = 1.0;
  std::uint64_t seed = 0;
  int concurrency = 0;
};

inline int sample(const SampleArgs& a, std::ostream& out) {
  const RunConfig config = load_config(a.config);
  const EndpointConfig* ep = nullptr;
  if (!a.judge.empty()) {
    ep = config.find_judge(a.judge);
  } else {
    for (const auto& j : config.judges)
      if (j.role == JudgeRole::Generator) ep = &j;
  }
  if (!ep)
    throw Error(ErrorCode::kInvalidEndpoint, "no generator endpoint; pass --judge or mark one with role 'generator'",
                a.judge);

  const auto prompts = read_records<PromptRecord>(a.prompts);
  const auto make_client = http_client_factory(std::chrono::duration<double>(config.timeout_seconds));
  GeneratorFactory factory = [&]() -> std::unique_ptr<JudgmentGenerator> {
    return std::make_unique<EndpointGenerator>(make_client(*ep), ep->model, a.temperature, config.max_tokens,
                                               config.max_attempts, std::chrono::milliseconds(config.backoff_ms),
                                               a.seed);
  };
  const int concurrency = a.concurrency > 0 ? a.concurrency : config.concurrency;
  const auto records = rejection_sample_all(factory, prompts, a.m, concurrency, config.parse_policy);
  write_records(a.out, records);
  std::size_t accepted = 0, total = 0;
  for (const auto& r : records) {
    accepted += r.accepted_count();
    total += r.candidates.size();
  }
  out << json{{"records", records.size()},
              {"candidates", total},
              {"accepted", accepted},
              {"acceptance_rate", total == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(total)},
              {"out", a.out}}
             .dump()
      << '\n';
  return 0;
}

// --- emit -----------------------------------------------------------------

struct EmitArgs {
  std::string records, split = "rft", out, audit;
};

inline int emit(const EmitArgs& a, std::ostream& out, std::ostream& err) {
  Split split;
  if (a.split == "rft") split = Split::RFT;
  else if (a.split == "sft") split = Split::SFT;
  else throw Error(ErrorCode::kInvalidFlags, "--split must be 'sft' or 'rft'", a.split);
  const auto records = read_records<CurationRecord>(a.records);
  const std::string audit = a.audit.empty() ? a.out + ".audit.jsonl" : a.audit;
  const EmitSummary s = emit_training_records(records, split, a.out, audit);
  for (const auto& w : s.warnings) err << w << '\n';
  out << json{{"lines", s.lines},
              {"accepted", s.accepted},
              {"rejected", s.rejected},
              {"records_without_accepted", s.records_without_accepted},
              {"out", a.out},
              {"audit", audit}}
             .dump()
      << '\n';
  return 0;
}

// --- loss-check -----------------------------------------------------------

struct LossCheckArgs {
  std::size_t points = 100;
  std::size_t vocab = 16;
  std::uint64_t seed = 0;
  double tolerance = 1e-4;
};

inline int loss_check(const LossCheckArgs& a, std::ostream& out) {
  if (a.vocab < 2) throw Error(ErrorCode::kInvalidFlags, "--vocab must be at least 2");
  const losses::LossParams params;
  std::mt19937_64 rng(a.seed);
  std::vector<losses::PositionLogits> points;
  points.reserve(a.points);
  for (std::size_t i = 0; i < a.points; ++i) points.push_back(losses::random_check_point(rng, a.vocab, params));

  bool ok = true;
  for (auto m : {losses::Mapping::DPO, losses::Mapping::Temperature, losses::Mapping::Margin}) {
    double worst = 0.0;
    for (const auto& pl : points) worst = std::max(worst, losses::grad_check(m, pl, params));
    const bool pass = worst <= a.tolerance;
    ok = ok && pass;
    out << json{{"mapping", std::string(losses::to_string(m))},
                {"points", points.size()},
                {"max_relative_error", worst},
                {"tolerance", a.tolerance},
                {"pass", pass}}
               .dump()
        << '\n';
  }
  return ok ? 0 : 1;
}

// --- stub-serve -----------------------------------------------------------

struct StubServeArgs {
  int port = 0;
  std::string script;
};

// Script file: either a bare StubScript object or
// {"default": {...}, "models": {"<model>": {...}}}.
inline int stub_serve(const StubServeArgs& a, std::ostream& out) {
  StubScript def;
  std::map<std::string, StubScript> per_model;
  if (!a.script.empty()) {
    const json doc = load_json_file(a.script);
    try {
      if (doc.contains("default") || doc.contains("models")) {
        if (doc.contains("default")) def = doc["default"].get<StubScript>();
        if (doc.contains("models"))
          for (const auto& [model, s] : doc["models"].items()) per_model[model] = s.get<StubScript>();
      } else {
        def = doc.get<StubScript>();
      }
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kParseFailure, e.what(), a.script);
    }
  }

  // Block the stop signals before the server spawns threads so only the
  // sigwait below sees them.
  sigset_t stop_signals;
  sigemptyset(&stop_signals);
  sigaddset(&stop_signals, SIGINT);
  sigaddset(&stop_signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &stop_signals, nullptr);

  StubServer server(def, per_model);
  server.start(a.port);
  out << json{{"url", server.url()}, {"port", server.port()}}.dump() << '\n' << std::flush;
  int sig = 0;
  sigwait(&stop_signals, &sig);
  server.stop();
  out << json{{"stopped", true}, {"signal", sig}, {"requests", server.request_count()},
              {"max_concurrency", server.max_concurrency()}}
             .dump()
      << '\n';
  pthread_sigmask(SIG_UNBLOCK, &stop_signals, nullptr);
  return 0;
}

inline void print_error(std::ostream& err, ErrorCode code, const std::string& message, const std::string& path = {}) {
  json rec{{"error", std::string(error_code_name(code))}, {"message", message}};
  if (!path.empty()) rec["path"] = path;
  err << rec.dump() << '\n';
}

}  // namespace cli

// args excludes the program name. Returns the process exit status.
inline int command_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  static const std::set<std::string> kCommands{"run-eval", "sample", "consensus", "score",      "report",
                                               "curate",   "emit",   "loss-check", "stub-serve"};
  if (args.empty() || args[0] == "-h" || args[0] == "--help" || args[0] == "help") {
    (args.empty() ? err : out) << kUsage;
    return args.empty() ? 2 : 0;
  }
  if (!kCommands.count(args[0])) {
    cli::print_error(err, ErrorCode::kUnknownCommand, "unknown command '" + args[0] + "'");
    err << kUsage;
    return 2;
  }

  CLI::App app{"judgebench: pairwise LLM judge evaluation and judgment data curation", "judgebench"};
  app.require_subcommand(1, 1);

  cli::RunEvalArgs run_eval;
  auto* c_run = app.add_subcommand("run-eval", "judge every (query, candidate) pair with the configured judges");
  c_run->add_option("--config", run_eval.config, "run configuration (JSON)")->required();
  c_run->add_option("--dataset", run_eval.dataset, "benchmark items (JSON lines)")->required();
  c_run->add_option("--out", run_eval.out, "judgment records to write");
  c_run->add_option("--judge", run_eval.judges, "restrict to these judge ids");
  c_run->add_flag("--dry-run", run_eval.dry_run, "print the plan size and exit without any request");

  cli::ConsensusArgs cons;
  auto* c_cons = app.add_subcommand("consensus", "majority vote over ground-truth judge records");
  c_cons->add_option("--records", cons.records, "judgment record files")->required();
  c_cons->add_option("--judge", cons.judges, "only count these judge ids");
  c_cons->add_option("--out", cons.out, "consensus records to write")->required();
  c_cons->add_option("--excluded", cons.excluded, "excluded-sample sidecar (default <out>.excluded.jsonl)");
  c_cons->add_option("--id", cons.id, "judge id of the consensus records");

  cli::ScoreArgs sc;
  auto* c_score = app.add_subcommand("score", "score a test judge against ground truth");
  c_score->add_option("--gt", sc.gt, "ground-truth records")->required();
  c_score->add_option("--test", sc.test, "test judge records")->required();
  c_score->add_option("--test-judge", sc.test_judge, "judge id to score when --test holds several");
  c_score->add_option("--config", sc.config, "run configuration supplying the candidate list");
  c_score->add_option("--candidates", sc.candidates, "candidate models (overrides --config)");
  c_score->add_option("--run-records", sc.run_records, "records used for run statistics (default --test)");
  c_score->add_option("--out", sc.out, "score bundle to write (default score.json)");

  cli::ReportArgs rep;
  auto* c_rep = app.add_subcommand("report", "render a score bundle as text, csv or json");
  c_rep->add_option("--score", rep.score, "score bundle written by 'score'")->required();
  c_rep->add_option("--formats", rep.formats, "any of table, csv, json")->delimiter(',');
  c_rep->add_option("--run-records", rep.run_records, "recompute run statistics from these records");
  c_rep->add_option("--out-dir", rep.out_dir, "output directory");

  cli::CurateArgs cur;
  auto* c_cur = app.add_subcommand("curate", "render judge prompts for labelled preference pairs");
  c_cur->add_option("--input", cur.input, "labelled pairs (JSON lines)")->required();
  c_cur->add_option("--out", cur.out, "prompt records to write")->required();
  c_cur->add_option("--mode", cur.mode, "verify or style");
  c_cur->add_option("--directive", cur.directive, "style directive for --mode style");

  cli::SampleArgs smp;
  auto* c_smp = app.add_subcommand("sample", "rejection-sample judgments for curated prompts");
  c_smp->add_option("--config", smp.config, "run configuration (JSON)")->required();
  c_smp->add_option("--prompts", smp.prompts, "prompt records from 'curate'")->required();
  c_smp->add_option("--out", smp.out, "curation records to write")->required();
  c_smp->add_option("--judge", smp.judge, "endpoint id to sample from");
  c_smp->add_option("--m", smp.m, "candidates per prompt")->check(CLI::PositiveNumber);
  c_smp->add_option("--temperature", smp.temperature, "sampling temperature");
  c_smp->add_option("--seed", smp.seed, "base seed; sample j uses seed + j");
  c_smp->add_option("--concurrency", smp.concurrency, "worker count (default from config)");

  cli::EmitArgs em;
  auto* c_emit = app.add_subcommand("emit", "write SFT or RFT training lines from sampled records");
  c_emit->add_option("--records", em.records, "curation records from 'sample'")->required();
  c_emit->add_option("--split", em.split, "sft or rft");
  c_emit->add_option("--out", em.out, "training lines to write")->required();
  c_emit->add_option("--audit", em.audit, "rejected candidates (default <out>.audit.jsonl)");

  cli::LossCheckArgs lc;
  auto* c_lc = app.add_subcommand("loss-check", "finite-difference check of the loss gradients");
  c_lc->add_option("--points", lc.points, "random points per mapping");
  c_lc->add_option("--vocab", lc.vocab, "answer vocabulary size");
  c_lc->add_option("--seed", lc.seed, "random seed");
  c_lc->add_option("--tolerance", lc.tolerance, "max relative error");

  cli::StubServeArgs stub;
  auto* c_stub = app.add_subcommand("stub-serve", "run the local stub endpoint until interrupted");
  c_stub->add_option("--port", stub.port, "port on 127.0.0.1 (0 picks a free one)");
  c_stub->add_option("--script", stub.script, "stub script (JSON)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
    return 0;
  } catch (const CLI::ParseError& e) {
    cli::print_error(err, ErrorCode::kInvalidFlags, e.what(), args[0]);
    return 2;
  }

  try {
    if (c_run->parsed()) return cli::run_eval(run_eval, out);
    if (c_cons->parsed()) return cli::consensus(cons, out);
    if (c_score->parsed()) return cli::score(sc, out);
    if (c_rep->parsed()) return cli::report(rep, out);
    if (c_cur->parsed()) return cli::curate(cur, out);
    if (c_smp->parsed()) return cli::sample(smp, out);
    if (c_emit->parsed()) return cli::emit(em, out, err);
    if (c_lc->parsed()) return cli::loss_check(lc, out);
    if (c_stub->parsed()) return cli::stub_serve(stub, out);
  } catch (const Error& e) {
    cli::print_error(err, e.code(), e.detail(), e.path());
    return 1;
  } catch (const std::filesystem::filesystem_error& e) {
    cli::print_error(err, ErrorCode::kIoFailure, e.what(), e.path1().string());
    return 1;
  } catch (const std::exception& e) {
    cli::print_error(err, ErrorCode::kInvalidArgument, e.what());
    return 1;
  }
  cli::print_error(err, ErrorCode::kUnknownCommand, "no command given");
  err << kUsage;
  return 2;
}

}  // namespace judgebench
