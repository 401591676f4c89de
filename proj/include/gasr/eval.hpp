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

#ifndef GASR_EVAL_HPP_
#define GASR_EVAL_HPP_

#include <map>
#include <string>
#include <vector>

#include "gasr/lexicon.hpp"

namespace gasr {

struct WerBreakdown {
  long substitutions = 0;
  long insertions = 0;
  long deletions = 0;
  long ref_token_count = 0;

  long Errors() const { return substitutions + insertions + deletions; }
  // May exceed 1 when insertions dominate.
  double Wer() const;
  void Merge(const WerBreakdown& o);
};

// Minimum-edit-distance alignment with unit costs. When alignments tie
// the backtrace prefers substitution over insertion over deletion.
WerBreakdown Wer(const std::vector<std::string>& ref,
                 const std::vector<std::string>& hyp);

// Hypothesis tokens absent from the target-language lexicon.
long MismatchedTokenCount(const std::vector<std::string>& hyp_tokens,
                          const Lexicon& target_lexicon);

// Fraction of hypothesis tokens absent from the target-language
// lexicon. An empty hypothesis rates 0 and sets *empty_hypothesis.
double MismatchedLanguageRate(const std::vector<std::string>& hyp_tokens,
                              const Lexicon& target_lexicon,
                              bool* empty_hypothesis = nullptr);

struct EvalReport {
  // Category name -> WER percent. Keys are a subset of
  // {clean, noisy, xtrm1, xtrm2}.
  std::map<std::string, double> category_wer;
  double average = 0.0;  // unweighted mean over present categories
  bool has_gain = false;
  double gain = 0.0;  // percent WER reduction relative to a baseline
  double mismatched_rate = 0.0;
  double oov_rate = 0.0;
};

// Average over 1 to 4 categories; the second form also computes the
// relative gain (baseline - average) / baseline * 100 against a prior
// average. Values stay at full precision; rounding happens at render
// time only.
EvalReport Summarize(const std::map<std::string, double>& category_wer);
EvalReport Summarize(const std::map<std::string, double>& category_wer,
                     double baseline_average);

// Two-line aligned table: category columns, then Average and Gain,
// one decimal, "-" where a value is absent.
std::string RenderReportTable(const EvalReport& report);

// Machine-readable "metric<TAB>value" lines at full precision.
std::string RenderMetrics(const EvalReport& report);

}  // namespace gasr

#endif  // GASR_EVAL_HPP_
