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

#include <random>
#include <string>

#include "judgebench/stub_server.hpp"
#include "judgebench/verdict_parser.hpp"

namespace jb = judgebench;

namespace {

jb::ParsePolicy regex_only() {
  jb::ParsePolicy p;
  p.mode = jb::ParseMode::RegexOnly;
  return p;
}

jb::ParsePolicy with_ties() {
  jb::ParsePolicy p;
  p.allow_tie = true;
  return p;
}

}  // namespace

TEST(NormalizeChoiceToken, Examples) {
  EXPECT_EQ(jb::normalize_choice_token("Model A"), jb::Verdict::AWins);
  EXPECT_EQ(jb::normalize_choice_token("  model b "), jb::Verdict::BWins);
  EXPECT_EQ(jb::normalize_choice_token("both"), jb::Verdict::NoVerdict);
  EXPECT_EQ(jb::normalize_choice_token("[[B]]"), jb::Verdict::BWins);
  EXPECT_EQ(jb::normalize_choice_token("MODEL\n  A."), jb::Verdict::AWins);
  EXPECT_EQ(jb::normalize_choice_token("tie"), jb::Verdict::NoVerdict);
  EXPECT_EQ(jb::normalize_choice_token("Tie", true), jb::Verdict::Tie);
  EXPECT_EQ(jb::normalize_choice_token("Model C"), jb::Verdict::NoVerdict);
}

TEST(ParseVerdict, StructuredChoice) {
  const std::string out = R"(Some analysis first.
{
  "User's Demand": "sort a list",
  "Reasoning": "Model B forgot the edge case {empty input}.",
  "Choice": "Model A"
})";
  EXPECT_EQ(jb::parse_verdict(out, {}), jb::Verdict::AWins);
  const auto c = jb::extract_choice(out, {});
  EXPECT_EQ(c.rule, jb::ExtractionRule::Structured);
  ASSERT_TRUE(c.span);
  EXPECT_EQ(out.substr(c.span->offset, c.span->length), "Model A");
}

TEST(ParseVerdict, LastStructuredObjectWins) {
  const std::string out =
      "Format: {\"Choice\": \"[Model A or Model B]\"}\nDraft {\"Choice\": \"Model A\"}\nFinal {\"Choice\": \"Model B\"}";
  EXPECT_EQ(jb::parse_verdict(out, {}), jb::Verdict::BWins);
}

TEST(ParseVerdict, FallbackPhraseOnFinalLine) {
  EXPECT_EQ(jb::parse_verdict("Both are fine.\nTherefore, Model B is better.", {}), jb::Verdict::BWins);
  jb::ParsePolicy no_scan;
  no_scan.fallback_scan = false;
  EXPECT_EQ(jb::parse_verdict("Both are fine.\nTherefore, Model B is better.", no_scan), jb::Verdict::NoVerdict);
}

TEST(ParseVerdict, KeyPattern) {
  EXPECT_EQ(jb::parse_verdict("Reasoning: ...\nChoice: Model B\n", {}), jb::Verdict::BWins);
  EXPECT_EQ(jb::parse_verdict("choice = [[A]]", {}), jb::Verdict::AWins);
  EXPECT_EQ(jb::parse_verdict("**Choice**: B", regex_only()), jb::Verdict::BWins);
}

TEST(ParseVerdict, EmptyAndGarbageAreNoVerdict) {
  EXPECT_EQ(jb::parse_verdict("", {}), jb::Verdict::NoVerdict);
  EXPECT_EQ(jb::parse_verdict("{\"Choice\": \"both are great\"}", {}), jb::Verdict::NoVerdict);
  EXPECT_EQ(jb::parse_verdict("{{{{\"\"\"}}", {}), jb::Verdict::NoVerdict);
}

TEST(ParseVerdict, TiesOnlyWhenAllowed) {
  const std::string out = "{\"Choice\": \"Tie\"}";
  EXPECT_EQ(jb::parse_verdict(out, {}), jb::Verdict::NoVerdict);
  EXPECT_EQ(jb::parse_verdict(out, with_ties()), jb::Verdict::Tie);
}

TEST(ParseVerdict, CustomChoiceKey) {
  jb::ParsePolicy p;
  p.choice_key = "winner";
  EXPECT_EQ(jb::parse_verdict("{\"winner\": \"b\"}", p), jb::Verdict::BWins);
  EXPECT_EQ(jb::parse_verdict("{\"Choice\": \"Model A\"}", p), jb::Verdict::NoVerdict);
}

TEST(ParseVerdict, StubRepliesParse) {
  EXPECT_EQ(jb::parse_verdict(jb::stub_judgment_text("Model A"), {}), jb::Verdict::AWins);
  EXPECT_EQ(jb::parse_verdict(jb::stub_judgment_text("Model B"), regex_only()), jb::Verdict::BWins);
}

// Truncated replies and arbitrary bytes never throw and never invent a label
// the full reply does not contain.
TEST(ParseVerdictProperty, TotalityOverTruncationsAndNoise) {
  std::mt19937_64 rng(11);
  const std::string full = jb::stub_judgment_text("Model B");
  for (std::size_t n = 0; n <= full.size(); ++n) {
    const jb::Verdict v = jb::parse_verdict(full.substr(0, n), {});
    EXPECT_TRUE(v == jb::Verdict::BWins || v == jb::Verdict::NoVerdict) << n;
  }
  const std::string alphabet = "{}[]\":,ABab Model Choice\n\\*'=.tie";
  std::uniform_int_distribution<std::size_t> len(0, 200), pick(0, alphabet.size() - 1);
  for (int i = 0; i < 3000; ++i) {
    std::string s;
    for (std::size_t k = len(rng); k > 0; --k) s.push_back(alphabet[pick(rng)]);
    EXPECT_NO_THROW({
      const auto a = jb::parse_verdict(s, {});
      const auto b = jb::parse_verdict(s, {});
      EXPECT_EQ(a, b);  // determinism
    });
  }
}

// Without a structured object, RegexOnly and StructuredFirst agree.
TEST(ParseVerdictProperty, PolicyMonotonicity) {
  std::mt19937_64 rng(5);
  const std::vector<std::string> pieces = {"Choice: A",         "choice = Model B", "Model A is better",
                                           "I prefer model B",  "[[A]]",            "no idea",
                                           "Model B wins",      "\n",               "Choice: [Model A]"};
  std::uniform_int_distribution<std::size_t> pick(0, pieces.size() - 1), count(1, 5);
  for (int i = 0; i < 2000; ++i) {
    std::string s;
    for (std::size_t k = count(rng); k > 0; --k) s += pieces[pick(rng)] + " ";
    const auto regex = jb::parse_verdict(s, regex_only());
    if (jb::is_binary(regex)) {
      EXPECT_EQ(jb::parse_verdict(s, {}), regex) << s;
    }
  }
}

TEST(ParseVerdictProperty, SpanReparsesToVerdict) {
  for (const std::string& out : {jb::stub_judgment_text("Model A"), std::string("x\nChoice: b\n"),
                                  std::string("so Model A is clearly better")}) {
    const auto c = jb::extract_choice(out, {});
    ASSERT_TRUE(c.span) << out;
    EXPECT_EQ(jb::normalize_choice_token(out.substr(c.span->offset, c.span->length)), c.verdict);
  }
}
