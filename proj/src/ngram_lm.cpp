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

#include "gasr/ngram_lm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "gasr/common.hpp"

namespace gasr {

const char* kSentenceBegin = "<s>";
const char* kSentenceEnd = "</s>";

namespace {

constexpr double kLn10 = 2.302585092994045684;

TokenSeq Concat(const TokenSeq& a, const std::string& w) {
  TokenSeq out = a;
  out.push_back(w);
  return out;
}

TokenSeq Suffix(const TokenSeq& h) {
  return TokenSeq(h.begin() + 1, h.end());
}

}  // namespace

bool NgramModel::HasNgram(const TokenSeq& ngram) const {
  int k = static_cast<int>(ngram.size());
  if (k < 1 || k > order) return false;
  return tables[k].count(ngram) != 0;
}

double NgramModel::Score(const TokenSeq& context, const std::string& word,
                         bool allow_unknown) const {
  std::string w = word;
  if (!vocab.count(w)) {
    if (!allow_unknown)
      throw Error("Score: token '" + word + "' is not in the vocabulary");
    if (vocab.count("<unk>"))
      w = "<unk>";
    else
      return kZeroLog10;
  }
  TokenSeq h = context;
  if (static_cast<int>(h.size()) > order - 1)
    h.erase(h.begin(), h.end() - (order - 1));
  double bow_sum = 0.0;
  while (true) {
    TokenSeq ngram = Concat(h, w);
    int k = static_cast<int>(ngram.size());
    auto it = tables[k].find(ngram);
    if (it != tables[k].end()) return bow_sum + it->second;
    if (h.empty())
      throw Error("Score: no unigram entry for '" + w + "'");
    auto bit = backoffs.find(h);
    if (bit != backoffs.end()) bow_sum += bit->second;
    h = Suffix(h);
  }
}

NgramModel TrainNgram(const std::vector<TokenSeq>& corpus, int order,
                      double discount) {
  if (order < 1) throw Error("TrainNgram: order must be >= 1");
  if (discount < 0.0 || discount >= 1.0)
    throw Error("TrainNgram: discount must lie in [0, 1)");
  if (corpus.empty()) throw Error("TrainNgram: empty corpus");
  for (const TokenSeq& sent : corpus)
    for (const std::string& tok : sent)
      if (tok == kSentenceBegin || tok == kSentenceEnd)
        throw Error("TrainNgram: sentence markers may not appear as corpus "
                    "tokens");

  NgramModel model;
  model.order = order;
  model.discount = discount;
  model.tables.resize(order + 1);

  // counts[k]: k-gram counts over padded sentences. Windows ending in
  // the begin marker (only the bare begin unigram) are not events.
  std::vector<std::map<TokenSeq, long>> counts(order + 1);
  for (const TokenSeq& sent : corpus) {
    TokenSeq seq;
    seq.push_back(kSentenceBegin);
    seq.insert(seq.end(), sent.begin(), sent.end());
    seq.push_back(kSentenceEnd);
    int n = static_cast<int>(seq.size());
    for (int k = 1; k <= order; ++k) {
      for (int i = 0; i + k <= n; ++i) {
        if (seq[i + k - 1] == kSentenceBegin) continue;
        counts[k][TokenSeq(seq.begin() + i, seq.begin() + i + k)]++;
      }
    }
  }

  for (const auto& [unigram, c] : counts[1]) {
    (void)c;
    model.vocab.insert(unigram[0]);
  }
  model.vocab.insert(kSentenceBegin);

  // Context totals and distinct-successor counts per level.
  std::vector<std::map<TokenSeq, long>> ctot(order + 1);
  std::vector<std::map<TokenSeq, long>> distinct(order + 1);
  for (int k = 1; k <= order; ++k) {
    for (const auto& [ngram, c] : counts[k]) {
      TokenSeq h(ngram.begin(), ngram.end() - 1);
      ctot[k][h] += c;
      distinct[k][h] += 1;
    }
  }

  // Unigrams: maximum likelihood over predicted tokens; the begin
  // marker is context only and gets the zero sentinel.
  long total = 0;
  for (const auto& [unigram, c] : counts[1]) total += c;
  for (const auto& [unigram, c] : counts[1])
    model.tables[1][unigram] =
        std::log10(static_cast<double>(c) / static_cast<double>(total));
  model.tables[1][{kSentenceBegin}] = kZeroLog10;

  // Higher orders: absolute discounting with interpolated backoff.
  // p(w|h) = (c - D)/c(h) + bow(h) * p(w|h'), bow(h) = D*N1+(h)/c(h).
  for (int k = 2; k <= order; ++k) {
    for (const auto& [ngram, c] : counts[k]) {
      TokenSeq h(ngram.begin(), ngram.end() - 1);
      TokenSeq lower = Suffix(ngram);
      auto lit = model.tables[k - 1].find(lower);
      if (lit == model.tables[k - 1].end())
        throw Error("TrainNgram: missing lower-order entry (internal)");
      double ch = static_cast<double>(ctot[k][h]);
      double bow = discount * static_cast<double>(distinct[k][h]) / ch;
      double p = (static_cast<double>(c) - discount) / ch +
                 bow * std::pow(10.0, lit->second);
      model.tables[k][ngram] = std::log10(p);
    }
  }
  // Backoff weights for every observed context of length 1..order-1.
  for (int k = 2; k <= order; ++k) {
    for (const auto& [h, c] : ctot[k]) {
      double bow = discount * static_cast<double>(distinct[k].at(h)) /
                   static_cast<double>(c);
      model.backoffs[h] = bow > 0.0 ? std::log10(bow) : kZeroLog10;
    }
  }
  return model;
}

double ScoreSentence(const NgramModel& model, const TokenSeq& tokens,
                     bool allow_unknown) {
  TokenSeq context{kSentenceBegin};
  double total = 0.0;
  for (const std::string& tok : tokens) {
    total += model.Score(context, tok, allow_unknown);
    context.push_back(tok);
    while (static_cast<int>(context.size()) > model.order - 1 &&
           !context.empty())
      context.erase(context.begin());
  }
  total += model.Score(context, kSentenceEnd, allow_unknown);
  return total;
}

std::string WriteArpa(const NgramModel& model) {
  std::string out = "\\data\\\n";
  for (int k = 1; k <= model.order; ++k)
    out += "ngram " + std::to_string(k) + "=" +
           std::to_string(model.tables[k].size()) + "\n";
  char buf[64];
  for (int k = 1; k <= model.order; ++k) {
    out += "\n\\" + std::to_string(k) + "-grams:\n";
    for (const auto& [ngram, logp] : model.tables[k]) {
      std::snprintf(buf, sizeof(buf), "%.6f", logp);
      out += buf;
      out += '\t';
      out += JoinStrings(ngram, " ");
      if (k < model.order) {
        auto it = model.backoffs.find(ngram);
        if (it != model.backoffs.end()) {
          std::snprintf(buf, sizeof(buf), "%.6f", it->second);
          out += '\t';
          out += buf;
        }
      }
      out += '\n';
    }
  }
  out += "\n\\end\\\n";
  return out;
}

NgramModel ReadArpa(const std::string& text) {
  std::vector<std::string> lines = SplitString(text, '\n');
  NgramModel model;
  std::vector<long> declared;  // declared[k-1] = count for order k
  size_t ln = 0;
  auto fail = [&](const std::string& msg) -> void {
    throw StageInputError("ARPA line " + std::to_string(ln + 1) + ": " + msg);
  };

  // Header.
  while (ln < lines.size() && lines[ln] != "\\data\\") {
    if (!lines[ln].empty()) fail("expected \\data\\");
    ++ln;
  }
  if (ln == lines.size()) throw StageInputError("ARPA: missing \\data\\");
  ++ln;
  while (ln < lines.size() && !lines[ln].empty()) {
    std::vector<std::string> f = SplitWhitespace(lines[ln]);
    if (f.size() != 2 || f[0] != "ngram") fail("expected 'ngram k=N'");
    size_t eq = f[1].find('=');
    if (eq == std::string::npos) fail("expected 'ngram k=N'");
    int k = std::atoi(f[1].substr(0, eq).c_str());
    long n = std::atol(f[1].substr(eq + 1).c_str());
    if (k != static_cast<int>(declared.size()) + 1)
      fail("ngram orders must be declared consecutively from 1");
    declared.push_back(n);
    ++ln;
  }
  if (declared.empty()) throw StageInputError("ARPA: no ngram declarations");
  model.order = static_cast<int>(declared.size());
  model.tables.resize(model.order + 1);

  for (int k = 1; k <= model.order; ++k) {
    std::string header = "\\" + std::to_string(k) + "-grams:";
    while (ln < lines.size() && lines[ln].empty()) ++ln;
    if (ln == lines.size() || lines[ln] != header)
      fail("expected section " + header);
    ++ln;
    long seen = 0;
    while (ln < lines.size() && !lines[ln].empty() &&
           lines[ln][0] != '\\') {
      std::vector<std::string> f = SplitWhitespace(lines[ln]);
      bool has_bow = static_cast<int>(f.size()) == k + 2;
      if (!has_bow && static_cast<int>(f.size()) != k + 1)
        fail("expected logprob, " + std::to_string(k) +
             " tokens and an optional backoff");
      if (has_bow && k == model.order)
        fail("highest-order entries cannot carry a backoff");
      char* end = nullptr;
      double logp = std::strtod(f[0].c_str(), &end);
      if (*end != '\0') fail("bad logprob '" + f[0] + "'");
      TokenSeq ngram(f.begin() + 1, f.begin() + 1 + k);
      if (model.tables[k].count(ngram)) fail("duplicate ngram");
      model.tables[k][ngram] = logp;
      if (has_bow) {
        double bow = std::strtod(f[k + 1].c_str(), &end);
        if (*end != '\0') fail("bad backoff '" + f[k + 1] + "'");
        model.backoffs[ngram] = bow;
      }
      ++seen;
      ++ln;
    }
    if (seen != declared[k - 1])
      fail("section " + header + " declared " +
           std::to_string(declared[k - 1]) + " entries but has " +
           std::to_string(seen));
  }
  while (ln < lines.size() && lines[ln].empty()) ++ln;
  if (ln == lines.size() || lines[ln] != "\\end\\")
    fail("expected \\end\\");

  for (const auto& [unigram, logp] : model.tables[1]) {
    (void)logp;
    model.vocab.insert(unigram[0]);
  }
  return model;
}

Wfst BuildG(const NgramModel& model, const SymbolTable& word_symbols) {
  std::vector<std::string> missing;
  for (const std::string& w : model.vocab) {
    if (w == kSentenceBegin || w == kSentenceEnd) continue;
    if (!word_symbols.Contains(w)) missing.push_back(w);
  }
  if (!missing.empty())
    throw Error("BuildG: vocabulary words missing from the symbol table: " +
                JoinStrings(missing, " "));

  // States are the stored contexts: the empty context, plus every
  // (k-1)-gram that is a prefix of a stored k-gram or has a backoff.
  std::set<TokenSeq> contexts;
  contexts.insert(TokenSeq{});
  for (int k = 2; k <= model.order; ++k)
    for (const auto& [ngram, logp] : model.tables[k]) {
      (void)logp;
      contexts.insert(TokenSeq(ngram.begin(), ngram.end() - 1));
    }
  for (const auto& [h, bow] : model.backoffs) {
    (void)bow;
    contexts.insert(h);
  }

  Wfst g(word_symbols, word_symbols);
  std::map<TokenSeq, int> state_of;
  // Shorter contexts first, lexicographic within a length, so state ids
  // are reproducible.
  std::vector<TokenSeq> ordered(contexts.begin(), contexts.end());
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const TokenSeq& a, const TokenSeq& b) {
                     if (a.size() != b.size()) return a.size() < b.size();
                     return a < b;
                   });
  for (const TokenSeq& h : ordered) state_of[h] = g.AddState();

  auto longest_context_suffix = [&](TokenSeq h) {
    int limit = model.order - 1;
    if (static_cast<int>(h.size()) > limit)
      h.erase(h.begin(), h.end() - limit);
    while (!state_of.count(h)) h = Suffix(h);
    return h;
  };

  // Backoff arcs walk one suffix step per arc.
  for (const TokenSeq& h : ordered) {
    if (h.empty()) continue;
    TokenSeq next = Suffix(h);
    while (!state_of.count(next)) next = Suffix(next);
    double bow_log10 = 0.0;
    auto it = model.backoffs.find(h);
    if (it != model.backoffs.end()) bow_log10 = it->second;
    Arc arc{kEpsilonLabel, kEpsilonLabel, -kLn10 * bow_log10,
            state_of.at(next)};
    g.AddArc(state_of.at(h), arc);
  }

  for (int k = 1; k <= model.order; ++k) {
    for (const auto& [ngram, logp] : model.tables[k]) {
      TokenSeq h(ngram.begin(), ngram.end() - 1);
      const std::string& w = ngram.back();
      auto hit = state_of.find(h);
      if (hit == state_of.end()) continue;  // context never stored
      int src = hit->second;
      if (w == kSentenceEnd) {
        double weight = -kLn10 * logp;
        if (weight < g.Final(src)) g.SetFinal(src, weight);
        continue;
      }
      if (w == kSentenceBegin) continue;  // context only, never an event
      int label = g.InputSymbols().FindId(w);
      int dest = state_of.at(longest_context_suffix(Concat(h, w)));
      Arc arc{label, label, -kLn10 * logp, dest};
      g.AddArc(src, arc);
    }
  }

  TokenSeq start_ctx{kSentenceBegin};
  auto sit = state_of.find(start_ctx);
  g.SetStart(sit != state_of.end() ? sit->second : state_of.at(TokenSeq{}));
  return g;
}

}  // namespace gasr
