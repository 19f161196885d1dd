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

// Offline benchmark fixtures served by the stub endpoint.

#pragma once

#include <string>
#include <vector>

#include "judgebench/domain.hpp"
#include "judgebench/orchestrator.hpp"

namespace judgebench::testing {

// Candidate m<i> writes answers whose length grows with i, so a stub judge
// that prefers longer responses induces a known leaderboard.
inline std::vector<DatasetItem> make_dataset(std::size_t n_queries, const std::vector<std::string>& models,
                                             std::size_t n_scenarios = 5) {
  std::vector<DatasetItem> out;
  for (std::size_t q = 0; q < n_queries; ++q) {
    DatasetItem d;
    d.query_id = "q" + std::to_string(q);
    d.scenario = "scenario" + std::to_string(q % n_scenarios);
    d.language = q % 2 ? Language::zh : Language::en;
    d.difficulty = q % 3 ? "easy" : "hard";
    d.query = "Question " + std::to_string(q) + ": explain {something} clearly.";
    // Odd policy lengths and even candidate lengths (for names m0..m9) keep
    // the longer-response rule free of ties.
    d.policy_response = "Policy answer " + std::string(2 * (20 + (q * 7) % 40) + 1, 'p');
    for (std::size_t m = 0; m < models.size(); ++m)
      d.responses[models[m]] = "Answer by " + models[m] + " " + std::string(2 * (10 + 4 * m + (q * 13) % 15) + 1, 'x');
    out.push_back(std::move(d));
  }
  return out;
}

inline EndpointConfig endpoint(const std::string& id, const std::string& url, JudgeRole role = JudgeRole::Test) {
  return EndpointConfig{id, url, id, "", role};
}

inline RunConfig stub_config(const std::vector<EndpointConfig>& judges, const std::vector<std::string>& models,
                             const std::string& cache_dir) {
  RunConfig c;
  c.judges = judges;
  c.candidates = models;
  c.cache_dir = cache_dir;
  c.concurrency = 8;
  c.backoff_ms = 1;
  c.timeout_seconds = 10;
  return c;
}

}  // namespace judgebench::testing
