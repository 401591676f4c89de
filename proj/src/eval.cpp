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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <vector>

#include "gasr/common.hpp"
#include "gasr/manifest.hpp"

namespace gasr {

double WerBreakdown::Wer() const {
  if (ref_token_count <= 0)
    throw Error("WerBreakdown: no reference tokens");
  return static_cast<double>(Errors()) / static_cast<double>(ref_token_count);
}

void WerBreakdown::Merge(const WerBreakdown& o) {
  substitutions += o.substitutions;
  insertions += o.insertions;
  deletions += o.deletions;
  ref_token_count += o.ref_token_count;
}

WerBreakdown Wer(const std::vector<std::string>& ref,
                 const std::vector<std::string>& hyp) {
  if (ref.empty()) throw Error("Wer: empty reference");
  int nr = static_cast<int>(ref.size());
  int nh = static_cast<int>(hyp.size());

  // d(i, j) is the edit distance between ref[0..i) and hyp[0..j).
  std::vector<std::vector<int>> d(nr + 1, std::vector<int>(nh + 1, 0));
  for (int j = 0; j <= nh; ++j) d[0][j] = j;
  for (int i = 1; i <= nr; ++i) {
    d[i][0] = i;
    for (int j = 1; j <= nh; ++j) {
      int sub = d[i - 1][j - 1] + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      int ins = d[i][j - 1] + 1;
      int del = d[i - 1][j] + 1;
      d[i][j] = std::min(sub, std::min(ins, del));
    }
  }

  WerBreakdown out;
  out.ref_token_count = nr;
  int i = nr, j = nh;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 &&
        d[i][j] == d[i - 1][j - 1] + (ref[i - 1] == hyp[j - 1] ? 0 : 1)) {
      if (ref[i - 1] != hyp[j - 1]) ++out.substitutions;
      --i;
      --j;
    } else if (j > 0 && d[i][j] == d[i][j - 1] + 1) {
      ++out.insertions;
      --j;
    } else {
      ++out.deletions;
      --i;
    }
  }
  return out;
}

long MismatchedTokenCount(const std::vector<std::string>& hyp_tokens,
                          const Lexicon& target_lexicon) {
  long count = 0;
  for (const std::string& token : hyp_tokens)
    if (!target_lexicon.ContainsWord(token)) ++count;
  return count;
}

double MismatchedLanguageRate(const std::vector<std::string>& hyp_tokens,
                              const Lexicon& target_lexicon,
                              bool* empty_hypothesis) {
  if (empty_hypothesis != nullptr) *empty_hypothesis = hyp_tokens.empty();
  if (hyp_tokens.empty()) return 0.0;
  return static_cast<double>(MismatchedTokenCount(hyp_tokens, target_lexicon)) /
         static_cast<double>(hyp_tokens.size());
}

EvalReport Summarize(const std::map<std::string, double>& category_wer) {
  if (category_wer.empty() || category_wer.size() > 4)
    throw Error("Summarize: need 1 to 4 categories, got " +
                std::to_string(category_wer.size()));
  double sum = 0.0;
  for (const auto& [category, wer] : category_wer) {
    if (!IsValidCategory(category))
      throw Error("Summarize: unknown category '" + category + "'");
    if (wer < 0.0)
      throw Error("Summarize: negative WER for category '" + category + "'");
    sum += wer;
  }
  EvalReport report;
  report.category_wer = category_wer;
  report.average = sum / static_cast<double>(category_wer.size());
  return report;
}

EvalReport Summarize(const std::map<std::string, double>& category_wer,
                     double baseline_average) {
  if (baseline_average <= 0.0)
    throw Error("Summarize: baseline average must be positive");
  EvalReport report = Summarize(category_wer);
  report.has_gain = true;
  report.gain =
      (baseline_average - report.average) / baseline_average * 100.0;
  return report;
}

namespace {

// One decimal, half away from zero. Applied only at render time.
std::string FormatDisplay(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", std::round(value * 10.0) / 10.0);
  return buf;
}

std::string FormatMetric(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", value);
  return buf;
}

}  // namespace

std::string RenderReportTable(const EvalReport& report) {
  static const char* kColumns[] = {"clean", "noisy", "xtrm1",
                                   "xtrm2", "Average", "Gain"};
  std::vector<std::string> values;
  for (int c = 0; c < 4; ++c) {
    auto it = report.category_wer.find(kColumns[c]);
    values.push_back(it == report.category_wer.end()
                         ? "-"
                         : FormatDisplay(it->second));
  }
  values.push_back(FormatDisplay(report.average));
  values.push_back(report.has_gain ? FormatDisplay(report.gain) : "-");

  std::string header;
  std::string row;
  for (int c = 0; c < 6; ++c) {
    size_t width =
        std::max(std::string(kColumns[c]).size(), values[c].size());
    header += kColumns[c];
    header.append(width - std::string(kColumns[c]).size(), ' ');
    row += values[c];
    row.append(width - values[c].size(), ' ');
    if (c + 1 < 6) {
      header += "  ";
      row += "  ";
    }
  }
  return header + "\n" + row + "\n";
}

std::string RenderMetrics(const EvalReport& report) {
  static const char* kCategories[] = {"clean", "noisy", "xtrm1", "xtrm2"};
  std::string out;
  for (const char* category : kCategories) {
    auto it = report.category_wer.find(category);
    if (it == report.category_wer.end()) continue;
    out += "wer." + std::string(category) + "\t" +
           FormatMetric(it->second) + "\n";
  }
  out += "average\t" + FormatMetric(report.average) + "\n";
  if (report.has_gain) out += "gain\t" + FormatMetric(report.gain) + "\n";
  out += "mismatched_rate\t" + FormatMetric(report.mismatched_rate) + "\n";
  out += "oov_rate\t" + FormatMetric(report.oov_rate) + "\n";
  return out;
}

}  // namespace gasr
