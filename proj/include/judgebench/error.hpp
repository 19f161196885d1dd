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

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace judgebench {

enum class ErrorCode {
  kMissingField,
  kInvalidEndpoint,
  kEmptyModelSet,
  kInvalidArgument,
  kEmptyInput,
  kUnknownModel,
  kCoverageMismatch,
  kMissingResponse,
  kEndpointAuthFailure,
  kBudgetExceeded,
  kGeneratorFailure,
  kPortInUse,
  kIoFailure,
  kParseFailure,
  kUnknownCommand,
  kInvalidFlags,
};

inline std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMissingField: return "MissingField";
    case ErrorCode::kInvalidEndpoint: return "InvalidEndpoint";
    case ErrorCode::kEmptyModelSet: return "EmptyModelSet";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kUnknownModel: return "UnknownModel";
    case ErrorCode::kCoverageMismatch: return "CoverageMismatch";
    case ErrorCode::kMissingResponse: return "MissingResponse";
    case ErrorCode::kEndpointAuthFailure: return "EndpointAuthFailure";
    case ErrorCode::kBudgetExceeded: return "BudgetExceeded";
    case ErrorCode::kGeneratorFailure: return "GeneratorFailure";
    case ErrorCode::kPortInUse: return "PortInUse";
    case ErrorCode::kIoFailure: return "IoFailure";
    case ErrorCode::kParseFailure: return "ParseFailure";
    case ErrorCode::kUnknownCommand: return "UnknownCommand";
    case ErrorCode::kInvalidFlags: return "InvalidFlags";
  }
  return "Unknown";
}

// All library failures are reported through this exception. `path` names the
// offending config path, file, or record when one exists.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message, std::string path = {})
      : std::runtime_error(format(code, message, path)),
        code_(code),
        detail_(std::move(message)),
        path_(std::move(path)) {}

  ErrorCode code() const { return code_; }
  const std::string& detail() const { return detail_; }
  const std::string& path() const { return path_; }

 private:
  static std::string format(ErrorCode code, const std::string& message,
                            const std::string& path) {
    std::string out(error_code_name(code));
    if (!path.empty()) out += " at " + path;
    if (!message.empty()) out += ": " + message;
    return out;
  }

  ErrorCode code_;
  std::string detail_;
  std::string path_;
};

}  // namespace judgebench
