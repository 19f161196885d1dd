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

// Newline-delimited JSON record files.

#pragma once

#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "judgebench/domain.hpp"

namespace judgebench {

inline std::vector<json> read_json_lines(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot open for reading", path.string());
  std::vector<json> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      out.push_back(json::parse(line));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kParseFailure, e.what(), path.string() + ":" + std::to_string(line_no));
    }
  }
  return out;
}

template <typename T>
std::vector<T> read_records(const std::filesystem::path& path) {
  std::vector<T> out;
  std::size_t line_no = 0;
  for (const auto& j : read_json_lines(path)) {
    ++line_no;
    try {
      out.push_back(j.get<T>());
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kParseFailure, e.what(), path.string() + ": record " + std::to_string(line_no));
    }
  }
  return out;
}

inline void write_json_lines(const std::filesystem::path& path, std::span<const json> lines) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot open for writing", path.string());
  for (const auto& j : lines) out << j.dump() << '\n';
  if (!out) throw Error(ErrorCode::kIoFailure, "write failed", path.string());
}

template <typename T>
void write_records(const std::filesystem::path& path, std::span<const T> records) {
  std::vector<json> lines;
  lines.reserve(records.size());
  for (const auto& r : records) lines.push_back(r);
  write_json_lines(path, lines);
}

template <typename T>
void write_records(const std::filesystem::path& path, const std::vector<T>& records) {
  write_records(path, std::span<const T>(records));
}

}  // namespace judgebench
