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

// Extraction of a pairwise Verdict from a judge model's reply.
//
// Rules, tried in order until one yields a verdict:
//   1. (StructuredFirst only) the choice field of the last balanced {...}
//      object in the reply;
//   2. the last `Choice: <label>` key pattern anywhere in the reply;
//   3. (fallback_scan) the last choice phrase such as "Model B is better".
// The parser only ever maps the display labels A/B. Translating a label into
// "candidate won" is the orchestrator's job.

#pragma once

#include <algorithm>
#include <cctype>
#include <optional>
#include <regex>
#include <string>
#include <string_view>

#include "judgebench/domain.hpp"

namespace judgebench {

// Byte range inside a judge reply.
struct TextSpan {
  std::size_t offset = 0;
  std::size_t length = 0;
  bool operator==(const TextSpan&) const = default;
};

enum class ExtractionRule { None, Structured, KeyPattern, FallbackPhrase };

struct ChoiceExtraction {
  Verdict verdict = Verdict::NoVerdict;
  std::optional<TextSpan> span;
  ExtractionRule rule = ExtractionRule::None;
};

inline Verdict normalize_choice_token(std::string_view candidate, bool allow_tie = false) {
  std::string s;
  s.reserve(candidate.size());
  bool pending_space = false;
  for (unsigned char c : candidate) {
    if (std::isspace(c)) {
      pending_space = true;
      continue;
    }
    if (pending_space && !s.empty()) s.push_back(' ');
    pending_space = false;
    s.push_back(static_cast<char>(std::tolower(c)));
  }
  auto strip = [](unsigned char c) {
    return c == '[' || c == ']' || c == '"' || c == '\'' || c == '*' || c == '.' || c == '(' ||
           c == ')' || c == ' ';
  };
  while (!s.empty() && strip(s.front())) s.erase(s.begin());
  while (!s.empty() && strip(s.back())) s.pop_back();

  if (s == "model a" || s == "a") return Verdict::AWins;
  if (s == "model b" || s == "b") return Verdict::BWins;
  if (s == "tie" && allow_tie) return Verdict::Tie;
  return Verdict::NoVerdict;
}

namespace detail {

// Last top-level balanced {...} region. Quotes are honoured only inside an
// object, so stray quotes in surrounding prose cannot desynchronise the scan.
inline std::optional<TextSpan> last_structured_object(std::string_view text) {
  std::optional<TextSpan> last;
  int depth = 0;
  bool in_string = false;
  bool escaped = false;
  std::size_t start = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (depth == 0) {
      if (c == '{') {
        depth = 1;
        start = i;
        in_string = false;
      }
      continue;
    }
    if (in_string) {
      if (escaped) escaped = false;
      else if (c == '\\') escaped = true;
      else if (c == '"') in_string = false;
      continue;
    }
    if (c == '"') in_string = true;
    else if (c == '{') ++depth;
    else if (c == '}' && --depth == 0) last = TextSpan{start, i - start + 1};
  }
  return last;
}

inline std::string regex_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (std::string_view("\\^$.|?*+()[]{}").find(c) != std::string_view::npos) out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

// Last match of group 1 of `re` in `text`, as an absolute span.
inline std::optional<TextSpan> last_group_match(std::string_view text, const std::regex& re,
                                                std::size_t base = 0) {
  std::optional<TextSpan> last;
  using It = std::string_view::const_iterator;
  for (std::regex_iterator<It> it(text.begin(), text.end(), re), end; it != end; ++it) {
    const auto& m = *it;
    last = TextSpan{base + static_cast<std::size_t>(m.position(1)),
                    static_cast<std::size_t>(m.length(1))};
  }
  return last;
}

inline ChoiceExtraction from_span(std::string_view text, TextSpan span, const ParsePolicy& policy,
                                  ExtractionRule rule) {
  const Verdict v = normalize_choice_token(text.substr(span.offset, span.length), policy.allow_tie);
  if (v == Verdict::NoVerdict) return {};
  return {v, span, rule};
}

inline ChoiceExtraction structured_choice(std::string_view text, const ParsePolicy& policy) {
  const auto object = last_structured_object(text);
  if (!object) return {};
  const std::regex key_re("\"" + regex_escape(policy.choice_key) +
                              "\"\\s*:\\s*\"((?:[^\"\\\\]|\\\\.)*)\"",
                          std::regex::icase);
  const auto span = last_group_match(text.substr(object->offset, object->length), key_re,
                                     object->offset);
  if (!span) return {};
  return from_span(text, *span, policy, ExtractionRule::Structured);
}

inline ChoiceExtraction key_pattern_choice(std::string_view text, const ParsePolicy& policy) {
  const std::regex key_re("[\"'*]*" + regex_escape(policy.choice_key) +
                              "[\"'*]*\\s*[:=]\\s*[\"'\\[*]*\\s*(model\\s*[ab]|[ab]|tie)"
                              "[\"'\\]*]*\\s*(?:[,.;}\\r\\n]|$)",
                          std::regex::icase);
  const auto span = last_group_match(text, key_re);
  if (!span) return {};
  return from_span(text, *span, policy, ExtractionRule::KeyPattern);
}

inline ChoiceExtraction fallback_choice(std::string_view text, const ParsePolicy& policy) {
  static const std::regex kPhrases[] = {
      std::regex("\\bmodel\\s+([ab])\\s+(?:is|was|seems|appears)\\s+(?:clearly\\s+|slightly\\s+|much\\s+|"
                 "overall\\s+|the\\s+)?(?:better|superior|preferred|stronger|winner|more\\s+suitable|"
                 "more\\s+appropriate|more\\s+helpful)",
                 std::regex::icase),
      std::regex("\\bmodel\\s+([ab])\\s+wins\\b", std::regex::icase),
      std::regex("\\b(?:choose|chose|prefer|select|pick|favou?r)\\s+model\\s+([ab])\\b",
                 std::regex::icase),
      std::regex("\\[\\[([ab])\\]\\]", std::regex::icase),
  };
  static const std::regex kTie("\\b(tie)\\b", std::regex::icase);

  std::optional<TextSpan> best;
  auto consider = [&](const std::optional<TextSpan>& s) {
    if (s && (!best || s->offset > best->offset)) best = s;
  };
  for (const auto& re : kPhrases) consider(last_group_match(text, re));
  if (policy.allow_tie) consider(last_group_match(text, kTie));
  if (!best) return {};
  return from_span(text, *best, policy, ExtractionRule::FallbackPhrase);
}

}  // namespace detail

// Total function: malformed or truncated replies yield NoVerdict.
inline ChoiceExtraction extract_choice(std::string_view raw_output, const ParsePolicy& policy) {
  try {
    if (policy.mode == ParseMode::StructuredFirst) {
      if (auto c = detail::structured_choice(raw_output, policy); c.verdict != Verdict::NoVerdict)
        return c;
    }
    if (auto c = detail::key_pattern_choice(raw_output, policy); c.verdict != Verdict::NoVerdict)
      return c;
    if (policy.fallback_scan) return detail::fallback_choice(raw_output, policy);
  } catch (const std::exception&) {
    // std::regex can throw on pathological inputs; treat as unparseable.
  }
  return {};
}

inline Verdict parse_verdict(std::string_view raw_output, const ParsePolicy& policy) {
  return extract_choice(raw_output, policy).verdict;
}

}  // namespace judgebench
