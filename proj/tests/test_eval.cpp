// Copyright 2025 The GASR Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "gasr/eval.hpp"

#include <string>
#include <vector>

#include "doctest.h"
#include "gasr/common.hpp"
#include "gasr/rng.hpp"

using namespace gasr;

namespace {

using Tokens = std::vector<std::string>;

// Plain Levenshtein distance, no backtrace: the independent check for
// the aligned error counts.
int EditDistance(const Tokens& a, const Tokens& b) {
  std::vector<std::vector<int>> d(a.size() + 1,
                                  std::vector<int>(b.size() + 1, 0));
  for (size_t j = 0; j <= b.size(); ++j) d[0][j] = static_cast<int>(j);
  for (size_t i = 1; i <= a.size(); ++i) {
    d[i][0] = static_cast<int>(i);
    for (size_t j = 1; j <= b.size(); ++j) {
      int sub = d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      d[i][j] = std::min({sub, d[i][j - 1] + 1, d[i - 1][j] + 1});
    }
  }
  return d[a.size()][b.size()];
}

Tokens RandomTokens(Rng* rng, int max_len) {
  static const char* kWords[] = {"a", "b", "c", "d"};
  Tokens out;
  int len = static_cast<int>(rng->UniformInt(0, max_len));
  for (int i = 0; i < len; ++i)
    out.push_back(kWords[rng->UniformInt(0, 3)]);
  return out;
}

Lexicon ToyLexicon(const std::vector<std::string>& words) {
  auto gset = BuildGraphemeSet(words, {ParseCodepointRange("U+0061-U+007A")},
                               DefaultExtraGraphemes(), "toy")
                  .set;
  std::vector<TaggedWord> tagged;
  for (const auto& w : words) tagged.push_back({w, "toy"});
  return BuildLexicon(tagged, gset).lexicon;
}

}  // namespace

TEST_CASE("eval: identical sequences have zero errors") {
  auto b = Wer({"a", "b", "c"}, {"a", "b", "c"});
  CHECK(b.Errors() == 0);
  CHECK(b.ref_token_count == 3);
  CHECK(b.Wer() == 0.0);
}

TEST_CASE("eval: single substitution") {
  auto b = Wer({"a", "b", "c"}, {"a", "x", "c"});
  CHECK(b.substitutions == 1);
  CHECK(b.insertions == 0);
  CHECK(b.deletions == 0);
  CHECK(b.Wer() == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("eval: swapped pair counts as two substitutions") {
  // The backtrace prefers substitutions on ties, so "ab" vs "ba" is two
  // substitutions, not an insert plus a delete.
  auto b = Wer({"a", "b"}, {"b", "a"});
  CHECK(b.substitutions == 2);
  CHECK(b.insertions == 0);
  CHECK(b.deletions == 0);
}

TEST_CASE("eval: pure insertions and deletions") {
  auto ins = Wer({"a"}, {"a", "b", "c"});
  CHECK(ins.insertions == 2);
  CHECK(ins.Errors() == 2);
  CHECK(ins.Wer() == doctest::Approx(2.0));  // may exceed 1

  auto del = Wer({"a", "b", "c"}, {"b"});
  CHECK(del.deletions == 2);
  CHECK(del.substitutions == 0);

  auto empty_hyp = Wer({"a", "b"}, {});
  CHECK(empty_hyp.deletions == 2);
  CHECK(empty_hyp.Wer() == doctest::Approx(1.0));
}

TEST_CASE("eval: empty reference is an error") {
  CHECK_THROWS_WITH_AS(Wer({}, {"a"}), doctest::Contains("empty reference"),
                       Error);
  WerBreakdown zero;
  CHECK_THROWS_AS(zero.Wer(), Error);
}

TEST_CASE("eval: error counts match the edit distance on random pairs") {
  Rng rng(515);
  for (int trial = 0; trial < 300; ++trial) {
    Tokens ref = RandomTokens(&rng, 8);
    if (ref.empty()) ref.push_back("a");
    Tokens hyp = RandomTokens(&rng, 8);
    auto b = Wer(ref, hyp);
    CHECK(b.Errors() == EditDistance(ref, hyp));
    CHECK(b.ref_token_count == static_cast<long>(ref.size()));
    // Alignment accounting: every ref token is matched, substituted or
    // deleted; every hyp token matched, substituted or inserted.
    long matches_r = static_cast<long>(ref.size()) - b.substitutions -
                     b.deletions;
    long matches_h = static_cast<long>(hyp.size()) - b.substitutions -
                     b.insertions;
    CHECK(matches_r == matches_h);
    CHECK(matches_r >= 0);
  }
}

TEST_CASE("eval: distance obeys the triangle inequality") {
  Rng rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    Tokens a = RandomTokens(&rng, 6);
    if (a.empty()) a.push_back("a");
    Tokens b = RandomTokens(&rng, 6);
    if (b.empty()) b.push_back("b");
    Tokens c = RandomTokens(&rng, 6);
    CHECK(Wer(a, c).Errors() <=
          Wer(a, b).Errors() + Wer(b, c).Errors());
  }
}

TEST_CASE("eval: breakdowns merge by addition") {
  auto total = Wer({"a", "b", "c"}, {"a", "x", "c"});
  total.Merge(Wer({"a"}, {"a", "b"}));
  CHECK(total.substitutions == 1);
  CHECK(total.insertions == 1);
  CHECK(total.ref_token_count == 4);
  CHECK(total.Wer() == doctest::Approx(0.5));
}

TEST_CASE("eval: mismatched language tokens") {
  Lexicon lex = ToyLexicon({"aa", "bb"});
  CHECK(MismatchedTokenCount({"aa", "zz", "bb", "q"}, lex) == 2);
  CHECK(MismatchedTokenCount({}, lex) == 0);
  CHECK(MismatchedLanguageRate({"aa", "zz", "bb", "q"}, lex) ==
        doctest::Approx(0.5));
  CHECK(MismatchedLanguageRate({"aa", "bb"}, lex) == 0.0);

  bool empty = false;
  CHECK(MismatchedLanguageRate({}, lex, &empty) == 0.0);
  CHECK(empty);
  CHECK(MismatchedLanguageRate({"aa"}, lex, &empty) == 0.0);
  CHECK(!empty);
}

TEST_CASE("eval: summary averages categories at full precision") {
  auto report = Summarize(
      {{"clean", 56.9}, {"noisy", 56.6}, {"xtrm1", 58.7}, {"xtrm2", 57.6}});
  CHECK(report.average == doctest::Approx(57.45).epsilon(1e-12));
  CHECK(!report.has_gain);
  // The half-up display rule turns 57.45 into 57.5.
  std::string table = RenderReportTable(report);
  CHECK(table.find("57.5") != std::string::npos);
}

TEST_CASE("eval: gain is relative reduction against the baseline") {
  auto report = Summarize({{"clean", 53.4}}, 57.5);
  CHECK(report.has_gain);
  CHECK(report.gain == doctest::Approx((57.5 - 53.4) / 57.5 * 100.0));
  CHECK(RenderReportTable(report).find("7.1") != std::string::npos);

  auto big = Summarize({{"clean", 38.0}}, 44.6);
  CHECK(big.gain == doctest::Approx((44.6 - 38.0) / 44.6 * 100.0));
  CHECK(RenderReportTable(big).find("14.8") != std::string::npos);
}

TEST_CASE("eval: summary validation") {
  CHECK_THROWS_WITH_AS(Summarize({}), doctest::Contains("1 to 4"), Error);
  CHECK_THROWS_WITH_AS(Summarize({{"dirty", 10.0}}),
                       doctest::Contains("unknown category"), Error);
  CHECK_THROWS_AS(Summarize({{"clean", -1.0}}), Error);
  CHECK_THROWS_WITH_AS(Summarize({{"clean", 10.0}}, 0.0),
                       doctest::Contains("baseline"), Error);
  CHECK_THROWS_AS(Summarize({{"clean", 10.0}}, -3.0), Error);
}

TEST_CASE("eval: report table renders dashes and aligns columns") {
  auto report = Summarize({{"clean", 41.25}, {"xtrm1", 60.0}});
  std::string table = RenderReportTable(report);
  std::vector<std::string> lines = SplitString(table, '\n');
  REQUIRE(lines.size() >= 2);
  CHECK(lines[0].rfind("clean", 0) == 0);
  CHECK(lines[0].find("Average") != std::string::npos);
  CHECK(lines[0].find("Gain") != std::string::npos);
  // Absent categories and the absent gain render as "-".
  CHECK(lines[1].find("-") != std::string::npos);
  CHECK(lines[1].find("41.3") != std::string::npos);  // half away from zero
  CHECK(lines[1].find("60.0") != std::string::npos);
  CHECK(lines[1].find("50.6") != std::string::npos);  // (41.25 + 60) / 2
  // Column starts line up between header and value row.
  CHECK(lines[0].size() == lines[1].size());
  size_t avg_col = lines[0].find("Average");
  CHECK(lines[1].substr(avg_col, 4) == "50.6");
}

TEST_CASE("eval: metrics render at full precision") {
  auto report = Summarize({{"clean", 41.25}, {"noisy", 60.0}}, 57.0);
  report.mismatched_rate = 0.012345678;
  report.oov_rate = 0.25;
  std::string metrics = RenderMetrics(report);
  CHECK(metrics.find("wer.clean\t41.25\n") != std::string::npos);
  CHECK(metrics.find("wer.noisy\t60\n") != std::string::npos);
  CHECK(metrics.find("average\t50.625\n") != std::string::npos);
  CHECK(metrics.find("mismatched_rate\t0.012345678\n") != std::string::npos);
  CHECK(metrics.find("oov_rate\t0.25\n") != std::string::npos);
  // Canonical order: categories, average, gain, rates.
  CHECK(metrics.find("wer.clean") < metrics.find("wer.noisy"));
  CHECK(metrics.find("wer.noisy") < metrics.find("average"));
  CHECK(metrics.find("average") < metrics.find("gain"));
  CHECK(metrics.find("gain") < metrics.find("mismatched_rate"));
  CHECK(metrics.find("mismatched_rate") < metrics.find("oov_rate"));

  auto no_gain = Summarize({{"clean", 10.0}});
  CHECK(RenderMetrics(no_gain).find("gain") == std::string::npos);
}
