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

// Judge prompt templates.
//
// Template bodies use `{name}` placeholders; `{{` and `}}` produce literal
// braces. Rendering is a single pass, so bound values are inserted verbatim
// and are never re-expanded, whatever braces they contain.

#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "judgebench/domain.hpp"

namespace judgebench {

inline constexpr std::string_view kCotTemplateId = "cot";
inline constexpr std::string_view kStyleTemplateId = "cot-style";

// Extra criterion for judges that should reward more detailed answers.
inline constexpr std::string_view kDetailPreferenceDirective =
    "Beyond this, users prefer a more detailed response; therefore, you need to determine which "
    "model’s answer provides more comprehensive and useful information when both responses are "
    "correct and have completed the user’s request";

// The seven analysis fields, in the order the judge must answer them.
inline const std::vector<std::string>& cot_fields() {
  static const std::vector<std::string> kFields = {
      "User's Demand",        "Strengths of Model A", "Weaknesses of Model A", "Strengths of Model B",
      "Weaknesses of Model B", "Reasoning",            "Choice"};
  return kFields;
}

inline constexpr std::string_view kCotTemplateBody =
    R"(Now we are reviewing a user's interaction with two models. Your task is to evaluate the responses from Model A and Model B by carefully analyzing the dialogue step by step, following a clear and structured thought process:

[User's Question]
{query}

[Model A's Response]
{response_a}

[Model B's Response]
{response_b}

1. User's Demand:
   - Carefully analyze the user's request. What is the user specifically asking for? What are the key aspects of the request that need to be fulfilled? Identify any constraints (e.g., time, format, quantity) the user has provided.

2. Strengths of Model A:
   - Identify the strengths of Model A's response. Consider how well it addresses the user's demand, meets the user’s constraints, and how well it serves the intended purpose.

3. Weaknesses of Model A:
   - Identify the weaknesses of Model A's response. What aspects of the response fail to meet the user's request or constraints? What could have been improved?

4. Strengths of Model B:
   - Identify the strengths of Model B's response. Consider how well it addresses the user's demand, meets the user’s constraints, and how well it serves the intended purpose.

5. Weaknesses of Model B:
   - Identify the weaknesses of Model B's response. What aspects of the response fail to meet the user's request or constraints? What could have been improved?

6. Reasoning:
   - Based on your analysis of both responses, explain which model better addresses the user's needs. Discuss which model's response is more suitable given the user's request and constraints.

7. Choice:
   - Conclude with a choice between Model A and Model B based on your reasoning. Indicate which model provides the more appropriate and useful response for the user's request.

Your final reply must be structured in the following format:
{{
  "User's Demand": "[The user's request or need]",
  "Strengths of Model A": "[Summary of the strengths of Model A]",
  "Weaknesses of Model A": "[Summary of the weaknesses of Model A]",
  "Strengths of Model B": "[Summary of the strengths of Model B]",
  "Weaknesses of Model B": "[Summary of the weaknesses of Model B]",
  "Reasoning": "[Explanation of which model is more suitable for the user's demand]",
  "Choice": "[Model A or Model B]"
}})";

class PromptTemplate {
 public:
  PromptTemplate(std::string id, std::string body) : id_(std::move(id)), body_(std::move(body)) {
    parse();
  }

  const std::string& id() const { return id_; }
  const std::string& body() const { return body_; }
  const std::vector<std::string>& placeholders() const { return names_; }

  std::string render(const std::map<std::string, std::string>& bindings) const {
    std::string out;
    out.reserve(body_.size() + 256);
    for (const auto& piece : pieces_) {
      if (!piece.is_placeholder) {
        out += piece.text;
        continue;
      }
      auto it = bindings.find(piece.text);
      if (it == bindings.end())
        throw Error(ErrorCode::kInvalidArgument, "unbound placeholder {" + piece.text + "}", id_);
      out += it->second;
    }
    return out;
  }

 private:
  struct Piece {
    bool is_placeholder = false;
    std::string text;
  };

  void parse() {
    std::string literal;
    for (std::size_t i = 0; i < body_.size(); ++i) {
      const char c = body_[i];
      if (c == '{' && i + 1 < body_.size() && body_[i + 1] == '{') {
        literal.push_back('{');
        ++i;
      } else if (c == '}' && i + 1 < body_.size() && body_[i + 1] == '}') {
        literal.push_back('}');
        ++i;
      } else if (c == '{') {
        const auto close = body_.find('}', i);
        if (close == std::string::npos) throw Error(ErrorCode::kInvalidArgument, "unterminated placeholder", id_);
        std::string name = body_.substr(i + 1, close - i - 1);
        if (name.empty() || !std::all_of(name.begin(), name.end(), [](unsigned char ch) {
              return std::isalnum(ch) || ch == '_';
            }))
          throw Error(ErrorCode::kInvalidArgument, "bad placeholder name '" + name + "'", id_);
        if (!literal.empty()) pieces_.push_back({false, std::move(literal)});
        literal.clear();
        if (std::find(names_.begin(), names_.end(), name) == names_.end()) names_.push_back(name);
        pieces_.push_back({true, std::move(name)});
        i = close;
      } else if (c == '}') {
        throw Error(ErrorCode::kInvalidArgument, "stray '}' in template body", id_);
      } else {
        literal.push_back(c);
      }
    }
    if (!literal.empty()) pieces_.push_back({false, std::move(literal)});
  }

  std::string id_;
  std::string body_;
  std::vector<Piece> pieces_;
  std::vector<std::string> names_;
};

inline const PromptTemplate& cot_template() {
  static const PromptTemplate kTemplate{std::string(kCotTemplateId), std::string(kCotTemplateBody)};
  return kTemplate;
}

// The CoT prompt with an extra evaluation criterion appended at the end.
inline const PromptTemplate& style_template() {
  static const PromptTemplate kTemplate(std::string(kStyleTemplateId),
                                        std::string(kCotTemplateBody) + "\n\n{style_directive}");
  return kTemplate;
}

inline const PromptTemplate& builtin_template(std::string_view id) {
  if (id == kCotTemplateId) return cot_template();
  if (id == kStyleTemplateId) return style_template();
  throw Error(ErrorCode::kInvalidArgument, "unknown prompt template '" + std::string(id) + "'");
}

inline std::map<std::string, std::string> task_bindings(const ComparisonTask& task) {
  return {{"query", task.query}, {"response_a", task.response_a()}, {"response_b", task.response_b()}};
}

inline std::string render_cot_prompt(const ComparisonTask& task) {
  return cot_template().render(task_bindings(task));
}

inline std::string render_style_prompt(const ComparisonTask& task, std::string_view directive) {
  if (directive.find_first_not_of(" \t\r\n") == std::string_view::npos)
    throw Error(ErrorCode::kInvalidArgument, "style directive must be non-empty");
  auto bindings = task_bindings(task);
  bindings["style_directive"] = std::string(directive);
  return style_template().render(bindings);
}

// Dispatch on a template id as named in the run configuration.
inline std::string render_prompt(std::string_view template_id, const ComparisonTask& task,
                                 std::string_view directive = {}) {
  if (template_id == kStyleTemplateId) return render_style_prompt(task, directive);
  return builtin_template(template_id).render(task_bindings(task));
}

}  // namespace judgebench
