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

#ifndef GASR_NGRAM_LM_HPP_
#define GASR_NGRAM_LM_HPP_

#include <map>
#include <set>
#include <string>
#include <vector>

#include "gasr/wfst.hpp"

namespace gasr {

extern const char* kSentenceBegin;  // "<s>"
extern const char* kSentenceEnd;    // "</s>"

// log10 sentinel for probability zero; also the conventional score of
// the begin marker, which is context only and never predicted.
constexpr double kZeroLog10 = -99.0;

typedef std::vector<std::string> TokenSeq;

// Backoff n-gram model with absolute discounting and interpolated
// lower-order mass. Scores are stored in log10, matching on-disk form.
struct NgramModel {
  int order = 0;
  double discount = 0.0;
  // tables[k] maps k-grams to log10 probabilities, k = 1..order
  // (index 0 unused).
  std::vector<std::map<TokenSeq, double>> tables;
  // backoff[h] is the log10 backoff weight of context h,
  // 1 <= |h| <= order-1.
  std::map<TokenSeq, double> backoffs;
  std::set<std::string> vocab;  // includes both sentence markers

  bool HasNgram(const TokenSeq& ngram) const;
  // log10 p(word | context) with backoff walking; context longer than
  // order-1 is truncated from the left. Unknown words raise an error
  // naming the token unless allow_unknown maps them to <unk>.
  double Score(const TokenSeq& context, const std::string& word,
               bool allow_unknown = false) const;
};

// Sentences are token sequences without sentence markers.
NgramModel TrainNgram(const std::vector<TokenSeq>& corpus, int order,
                      double discount);

// Total log10 probability including the end-of-sentence term. The empty
// sentence scores log10 p(end | begin).
double ScoreSentence(const NgramModel& model, const TokenSeq& tokens,
                     bool allow_unknown = false);

std::string WriteArpa(const NgramModel& model);
NgramModel ReadArpa(const std::string& text);

// Acceptor over word labels. States are stored contexts; backoff
// transitions are epsilon arcs weighted -ln(bow); word arcs carry
// -ln(10) * log10 p; the begin marker selects the start state and the
// end marker folds into final weights. Requires the model vocabulary
// (markers aside) to be present in word_symbols.
Wfst BuildG(const NgramModel& model, const SymbolTable& word_symbols);

}  // namespace gasr

#endif  // GASR_NGRAM_LM_HPP_
