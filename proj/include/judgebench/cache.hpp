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

// Content-addressed store of raw judge replies: one JSON file per entry,
// named by the hex SHA-256 of (judge id, template id, rendered prompt).

#pragma once

#include <atomic>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>

#include "judgebench/digest.hpp"
#include "judgebench/domain.hpp"

namespace judgebench {

struct CacheEntry {
  std::string key;
  std::string judge_id;
  std::string prompt_template_id;
  std::string raw_output;
  std::string created_at;  // UTC, ISO 8601
};

inline void to_json(json& j, const CacheEntry& e) {
  j = json{{"key", e.key},
           {"judge_id", e.judge_id},
           {"prompt_template_id", e.prompt_template_id},
           {"raw_output", e.raw_output},
           {"created_at", e.created_at}};
}

inline void from_json(const json& j, CacheEntry& e) {
  j.at("key").get_to(e.key);
  e.judge_id = j.value("judge_id", std::string{});
  e.prompt_template_id = j.value("prompt_template_id", std::string{});
  j.at("raw_output").get_to(e.raw_output);
  e.created_at = j.value("created_at", std::string{});
}

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline std::string cache_key(std::string_view judge_id, std::string_view template_id, std::string_view prompt) {
  return sha256_hex({judge_id, template_id, prompt});
}

// Readers may run concurrently with writers: entries are written to a
// temporary file and renamed into place, so a reader sees either nothing or a
// complete entry.
class ResponseCache {
 public:
  explicit ResponseCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

  const std::filesystem::path& dir() const { return dir_; }

  std::filesystem::path path_for(const std::string& key) const { return dir_ / key; }

  std::optional<CacheEntry> lookup(const std::string& key) const {
    std::ifstream in(path_for(key), std::ios::binary);
    if (!in) return std::nullopt;
    std::stringstream ss;
    ss << in.rdbuf();
    const json doc = json::parse(ss.str(), nullptr, /*allow_exceptions=*/false);
    if (doc.is_discarded()) return std::nullopt;
    try {
      auto entry = doc.get<CacheEntry>();
      if (entry.key != key) return std::nullopt;
      return entry;
    } catch (const json::exception&) {
      return std::nullopt;
    }
  }

  void store(const CacheEntry& entry) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw Error(ErrorCode::kIoFailure, ec.message(), dir_.string());
    const auto final_path = path_for(entry.key);
    std::ostringstream tmp_name;
    tmp_name << entry.key << ".tmp." << std::this_thread::get_id() << "." << counter_.fetch_add(1);
    const auto tmp_path = dir_ / tmp_name.str();
    {
      std::ofstream out(tmp_path, std::ios::binary | std::ios::trunc);
      if (!out) throw Error(ErrorCode::kIoFailure, "cannot write cache entry", tmp_path.string());
      out << json(entry).dump();
    }
    std::filesystem::rename(tmp_path, final_path, ec);
    if (ec) throw Error(ErrorCode::kIoFailure, ec.message(), final_path.string());
  }

 private:
  std::filesystem::path dir_;
  std::atomic<std::uint64_t> counter_{0};
};

}  // namespace judgebench
