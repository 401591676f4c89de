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

#ifndef GASR_LEXICON_HPP_
#define GASR_LEXICON_HPP_

#include <map>
#include <string>
#include <vector>

#include "gasr/grapheme_set.hpp"

namespace gasr {

typedef std::vector<char32_t> Pronunciation;

// Graphemic lexicon: every pronunciation is the word's codepoint
// decomposition, so spellings are pronunciations.
struct Lexicon {
  // word -> pronunciations (deduplicated, insertion order).
  std::map<std::string, std::vector<Pronunciation>> entries;
  // word -> language tags (sorted, deduplicated). A word spelled
  // identically in two languages carries both tags.
  std::map<std::string, std::vector<std::string>> language_of_word;
  GraphemeSet grapheme_set;

  bool ContainsWord(const std::string& word) const {
    return entries.count(word) != 0;
  }
  int NumWords() const { return static_cast<int>(entries.size()); }

  // Lexicon text: "word<TAB>g1 g2 g3" with one line per pronunciation.
  // The language sidecar is "word<TAB>lang", one line per (word, tag).
  std::string ToText() const;
  std::string LanguageSidecarToText() const;
  static Lexicon FromText(const std::string& lexicon_text,
                          const std::string& sidecar_text,
                          GraphemeSet grapheme_set);
};

struct TaggedWord {
  std::string word;
  std::string language;
};

struct LexiconResult {
  Lexicon lexicon;
  std::vector<RejectedWord> rejected;
};

// Decomposes each word into codepoints and keeps it when fully covered
// by the grapheme set; uncovered words are rejected with the offending
// codepoints. Duplicate (word, language) pairs collapse.
LexiconResult BuildLexicon(const std::vector<TaggedWord>& words,
                           const GraphemeSet& grapheme_set);

// Word-level union; identical spellings merge into one entry with the
// union of language tags and pronunciations.
Lexicon MergeLexicons(const std::vector<Lexicon>& lexicons);

// Fraction of tokens absent from the lexicon. Errors on an empty token
// list.
double OovRate(const std::vector<std::string>& tokens,
               const Lexicon& lexicon);

}  // namespace gasr

#endif  // GASR_LEXICON_HPP_
