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

#include "gasr/lexicon.hpp"

#include <algorithm>

#include "gasr/common.hpp"
#include "gasr/utf8.hpp"

namespace gasr {

std::string Lexicon::ToText() const {
  std::string out;
  for (const auto& [word, prons] : entries) {
    for (const Pronunciation& pron : prons) {
      out += word;
      out += '\t';
      for (size_t i = 0; i < pron.size(); ++i) {
        if (i) out += ' ';
        out += Utf8Encode(pron[i]);
      }
      out += '\n';
    }
  }
  return out;
}

std::string Lexicon::LanguageSidecarToText() const {
  std::string out;
  for (const auto& [word, langs] : language_of_word) {
    for (const std::string& lang : langs) {
      out += word;
      out += '\t';
      out += lang;
      out += '\n';
    }
  }
  return out;
}

Lexicon Lexicon::FromText(const std::string& lexicon_text,
                          const std::string& sidecar_text,
                          GraphemeSet grapheme_set) {
  Lexicon lex;
  lex.grapheme_set = std::move(grapheme_set);
  std::vector<std::string> lines = SplitString(lexicon_text, '\n');
  for (size_t ln = 0; ln < lines.size(); ++ln) {
    if (lines[ln].empty()) continue;
    std::vector<std::string> f = SplitString(lines[ln], '\t');
    if (f.size() != 2)
      throw StageInputError("lexicon line " + std::to_string(ln + 1) +
                            ": expected word<TAB>graphemes");
    Pronunciation pron;
    for (const std::string& g : SplitWhitespace(f[1])) {
      std::vector<char32_t> cps = Utf8Decode(g);
      if (cps.size() != 1)
        throw StageInputError("lexicon line " + std::to_string(ln + 1) +
                              ": grapheme '" + g +
                              "' is not a single codepoint");
      if (!lex.grapheme_set.Contains(cps[0]))
        throw StageInputError("lexicon line " + std::to_string(ln + 1) +
                              ": grapheme '" + g +
                              "' is outside the grapheme set");
      pron.push_back(cps[0]);
    }
    auto& prons = lex.entries[f[0]];
    if (std::find(prons.begin(), prons.end(), pron) == prons.end())
      prons.push_back(std::move(pron));
  }
  lines = SplitString(sidecar_text, '\n');
  for (size_t ln = 0; ln < lines.size(); ++ln) {
    if (lines[ln].empty()) continue;
    std::vector<std::string> f = SplitString(lines[ln], '\t');
    if (f.size() != 2)
      throw StageInputError("language sidecar line " + std::to_string(ln + 1) +
                            ": expected word<TAB>language");
    auto& langs = lex.language_of_word[f[0]];
    if (std::find(langs.begin(), langs.end(), f[1]) == langs.end())
      langs.push_back(f[1]);
  }
  for (auto& [word, langs] : lex.language_of_word)
    std::sort(langs.begin(), langs.end());
  return lex;
}

LexiconResult BuildLexicon(const std::vector<TaggedWord>& words,
                           const GraphemeSet& grapheme_set) {
  LexiconResult result;
  result.lexicon.grapheme_set = grapheme_set;
  for (const TaggedWord& tw : words) {
    if (tw.word.empty()) continue;
    std::vector<char32_t> cps = Utf8Decode(tw.word);
    std::vector<char32_t> uncovered;
    for (char32_t cp : cps)
      if (!grapheme_set.Contains(cp)) uncovered.push_back(cp);
    if (!uncovered.empty()) {
      result.rejected.push_back({tw.word, std::move(uncovered)});
      continue;
    }
    auto& prons = result.lexicon.entries[tw.word];
    if (std::find(prons.begin(), prons.end(), cps) == prons.end())
      prons.push_back(cps);
    auto& langs = result.lexicon.language_of_word[tw.word];
    if (std::find(langs.begin(), langs.end(), tw.language) == langs.end()) {
      langs.push_back(tw.language);
      std::sort(langs.begin(), langs.end());
    }
  }
  return result;
}

Lexicon MergeLexicons(const std::vector<Lexicon>& lexicons) {
  if (lexicons.empty()) throw Error("MergeLexicons: no inputs");
  Lexicon out;
  std::vector<GraphemeSet> gsets;
  for (const Lexicon& lex : lexicons) {
    gsets.push_back(lex.grapheme_set);
    for (const auto& [word, prons] : lex.entries) {
      auto& dst = out.entries[word];
      for (const Pronunciation& pron : prons)
        if (std::find(dst.begin(), dst.end(), pron) == dst.end())
          dst.push_back(pron);
    }
    for (const auto& [word, langs] : lex.language_of_word) {
      auto& dst = out.language_of_word[word];
      for (const std::string& lang : langs)
        if (std::find(dst.begin(), dst.end(), lang) == dst.end())
          dst.push_back(lang);
    }
  }
  for (auto& [word, langs] : out.language_of_word)
    std::sort(langs.begin(), langs.end());
  out.grapheme_set = UnionGraphemeSets(gsets);
  return out;
}

double OovRate(const std::vector<std::string>& tokens,
               const Lexicon& lexicon) {
  if (tokens.empty()) throw Error("OovRate: empty token list");
  long oov = 0;
  for (const std::string& tok : tokens)
    if (!lexicon.ContainsWord(tok)) ++oov;
  return static_cast<double>(oov) / static_cast<double>(tokens.size());
}

}  // namespace gasr
