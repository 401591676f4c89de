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

// Shared bilingual fixture: a Latin-uppercase language and a Cyrillic
// language with generated vocabularies, corpora, a bigram model and a
// context tree, assembled into decoding graphs on demand. Everything is
// derived from a single seed so tests stay reproducible.

#ifndef GASR_TESTS_TOY_SETUP_HPP_
#define GASR_TESTS_TOY_SETUP_HPP_

#include <cmath>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "gasr/context_tree.hpp"
#include "gasr/graph_builder.hpp"
#include "gasr/grapheme_set.hpp"
#include "gasr/lexicon.hpp"
#include "gasr/ngram_lm.hpp"
#include "gasr/rng.hpp"
#include "gasr/types.hpp"
#include "gasr/utf8.hpp"

namespace gasr_tests {

struct ToyLanguage {
  std::string tag;
  gasr::CodepointRange range;
  std::vector<std::string> words;
  std::vector<gasr::TokenSeq> sentences;
  gasr::GraphemeSet grapheme_set;
  gasr::Lexicon lexicon;
};

inline std::vector<std::string> MakeToyWords(const gasr::CodepointRange& range,
                                             int count, gasr::Rng* rng) {
  std::set<std::string> seen;
  std::vector<std::string> out;
  while (static_cast<int>(out.size()) < count) {
    int len = static_cast<int>(rng->UniformInt(2, 5));
    std::string word;
    for (int i = 0; i < len; ++i) {
      char32_t cp = static_cast<char32_t>(
          rng->UniformInt(static_cast<int64_t>(range.lo),
                          static_cast<int64_t>(range.hi)));
      word += gasr::Utf8Encode(cp);
    }
    if (seen.insert(word).second) out.push_back(word);
  }
  return out;
}

inline std::vector<gasr::TokenSeq> MakeToySentences(
    const std::vector<std::string>& words, int count, gasr::Rng* rng,
    int min_len = 3, int max_len = 8) {
  std::vector<gasr::TokenSeq> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    int len = static_cast<int>(rng->UniformInt(min_len, max_len));
    gasr::TokenSeq sentence;
    for (int j = 0; j < len; ++j) {
      int pick = static_cast<int>(
          rng->UniformInt(0, static_cast<int64_t>(words.size()) - 1));
      sentence.push_back(words[pick]);
    }
    out.push_back(std::move(sentence));
  }
  return out;
}

inline ToyLanguage MakeToyLanguage(const std::string& tag, char32_t lo,
                                   char32_t hi, uint64_t seed,
                                   int num_words = 50,
                                   int num_sentences = 120) {
  ToyLanguage lang;
  lang.tag = tag;
  lang.range = {lo, hi};
  gasr::Rng word_rng(gasr::DeriveSeed(seed, "words:" + tag));
  lang.words = MakeToyWords(lang.range, num_words, &word_rng);
  gasr::Rng sent_rng(gasr::DeriveSeed(seed, "sentences:" + tag));
  lang.sentences = MakeToySentences(lang.words, num_sentences, &sent_rng);

  auto gres = gasr::BuildGraphemeSet(lang.words, {lang.range},
                                     gasr::DefaultExtraGraphemes(), tag);
  lang.grapheme_set = gres.set;
  std::vector<gasr::TaggedWord> tagged;
  for (const auto& w : lang.words) tagged.push_back({w, tag});
  lang.lexicon = gasr::BuildLexicon(tagged, lang.grapheme_set).lexicon;
  return lang;
}

struct ToySetup {
  ToyLanguage lat;
  ToyLanguage cyr;
  gasr::GraphemeSet union_set;
  gasr::Lexicon merged;      // both vocabularies, union grapheme set
  gasr::NgramModel lm;       // bigram over both corpora
};

inline ToySetup MakeToySetup(uint64_t seed = 7) {
  ToySetup s;
  s.lat = MakeToyLanguage("lat", U'A', U'J', seed);
  s.cyr = MakeToyLanguage("cyr", U'а', U'й', seed);
  s.union_set =
      gasr::UnionGraphemeSets({s.lat.grapheme_set, s.cyr.grapheme_set});
  s.merged = gasr::MergeLexicons({s.lat.lexicon, s.cyr.lexicon});
  s.merged.grapheme_set = s.union_set;
  std::vector<gasr::TokenSeq> corpus = s.lat.sentences;
  corpus.insert(corpus.end(), s.cyr.sentences.begin(), s.cyr.sentences.end());
  s.lm = gasr::TrainNgram(corpus, 2, 0.5);
  return s;
}

// Swaps the inventory a lexicon carries; pronunciations must stay
// covered. Language-restricted graphs still need the union inventory so
// their symbols line up with the shared C and H.
inline gasr::Lexicon WithGraphemeSet(gasr::Lexicon lex,
                                     const gasr::GraphemeSet& gs) {
  lex.grapheme_set = gs;
  return lex;
}

// Synthetic tri-grapheme stats over the fixture's corpora: each unit's
// features pull toward a per-token embedding blended with its
// neighbors, so context questions carry real gain.
inline gasr::StatsTable MakeToyStats(const ToySetup& s, int dim = 4,
                                     int topology = 1, uint64_t seed = 11) {
  std::map<std::string, gasr::VectorX> embeddings;
  auto embed = [&](const std::string& token) -> const gasr::VectorX& {
    auto it = embeddings.find(token);
    if (it != embeddings.end()) return it->second;
    gasr::Rng rng(gasr::DeriveSeed(seed, "embed:" + token));
    gasr::VectorX v(dim);
    for (int d = 0; d < dim; ++d) v[d] = rng.Uniform(-1.0, 1.0);
    return embeddings.emplace(token, std::move(v)).first->second;
  };

  gasr::StatsTable table;
  const ToyLanguage* langs[] = {&s.lat, &s.cyr};
  for (const ToyLanguage* lang : langs) {
    for (size_t si = 0; si < lang->sentences.size(); ++si) {
      std::vector<std::string> tokens;
      tokens.push_back(gasr::kSilenceToken);
      for (const auto& word : lang->sentences[si]) {
        for (char32_t cp : gasr::Utf8Decode(word))
          tokens.push_back(gasr::Utf8Encode(cp));
      }
      tokens.push_back(gasr::kSilenceToken);

      auto tris = gasr::ExpandTrigraphemes(tokens);
      gasr::Rng utt_rng(gasr::DeriveSeed(
          seed, "utt:" + lang->tag + ":" + std::to_string(si)));
      for (const auto& tri : tris) {
        for (int pos = 0; pos < topology; ++pos) {
          gasr::VectorX v = embed(tri.center);
          v += 0.3 * embed(tri.left);
          v += 0.3 * embed(tri.right);
          for (int d = 0; d < dim; ++d) v[d] += 0.1 * utt_rng.Gaussian(0, 1);
          gasr::StatsKey key{tri.left, tri.center, tri.right, pos};
          table[key].Add(v);
        }
      }
    }
  }
  // Seed a frame for centers the corpora never produced (the standing
  // extras) so the grown tree maps the whole inventory.
  for (const std::string& center : gasr::CenterTokens(s.union_set)) {
    for (int pos = 0; pos < topology; ++pos) {
      bool seen = false;
      for (const auto& [key, stats] : table) {
        (void)stats;
        if (key.center == center && key.pos == pos) {
          seen = true;
          break;
        }
      }
      if (!seen)
        table[gasr::StatsKey{gasr::kBoundaryToken, center,
                             gasr::kBoundaryToken, pos}]
            .Add(embed(center));
    }
  }
  return table;
}

inline gasr::DecisionTree MakeToyTree(const ToySetup& s, int max_leaves = 96,
                                      int topology = 1, uint64_t seed = 11) {
  auto stats = MakeToyStats(s, 4, topology, seed);
  auto questions =
      gasr::GenerateQuestions({s.lat.grapheme_set, s.cyr.grapheme_set});
  return gasr::GrowTree(stats, questions, max_leaves, 0.0);
}

// Full assembly for one mode. The lexicon chooses the vocabulary (and
// must carry the union inventory); the model chooses the grammar.
inline gasr::DecodingGraph BuildToyGraph(const gasr::Lexicon& lexicon,
                                         const gasr::NgramModel& lm,
                                         const gasr::DecisionTree& tree,
                                         const gasr::GraphemeSet& union_set,
                                         const std::string& mode,
                                         int topology = 1) {
  auto l = gasr::BuildL(lexicon, std::log(2.0));
  auto g = gasr::BuildG(lm, gasr::MakeWordSymbols(lexicon));
  auto c = gasr::BuildC(union_set);
  auto h = gasr::BuildH(tree, topology, union_set);
  return gasr::BuildDecodingGraph(h, c, l, g, mode);
}

}  // namespace gasr_tests

#endif  // GASR_TESTS_TOY_SETUP_HPP_
