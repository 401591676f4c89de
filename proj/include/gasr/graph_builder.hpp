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

#ifndef GASR_GRAPH_BUILDER_HPP_
#define GASR_GRAPH_BUILDER_HPP_

#include <map>
#include <string>
#include <vector>

#include "gasr/context_tree.hpp"
#include "gasr/grapheme_set.hpp"
#include "gasr/lexicon.hpp"
#include "gasr/ngram_lm.hpp"
#include "gasr/symbol_table.hpp"
#include "gasr/wfst.hpp"

namespace gasr {

// Decoding units: the silence token then the inventory in codepoint
// order. Context tokens prepend the boundary padding token.
std::vector<std::string> CenterTokens(const GraphemeSet& gset);
std::vector<std::string> ContextTokens(const GraphemeSet& gset);

// <eps>, <sil>, then one symbol per grapheme. Disambiguation symbols
// are appended separately by BuildL.
SymbolTable MakeGraphemeSymbols(const GraphemeSet& gset);

// Full cross product "left-center+right" over context x center x
// context, in context-major order.
SymbolTable MakeTrigraphemeSymbols(const GraphemeSet& gset);

// <eps> then "t0".."t{count-1}"; tied id k carries symbol id k + 1.
SymbolTable MakeTiedStateSymbols(int leaf_count);

SymbolTable MakeWordSymbols(const Lexicon& lexicon);

struct LexiconFst {
  Wfst fst;            // grapheme strings to word strings
  int first_disambig = 0;  // symbol id of "#1"; 0 when none were needed
  int num_disambig = 0;
};

// Single-loop lexicon transducer. Every pronunciation leaves and
// re-enters the loop state; pronunciations that duplicate or prefix
// another get a disambiguation symbol so L composed with any grammar
// determinizes. The silence token is an optional self-loop at the loop
// state with weight silence_weight.
LexiconFst BuildL(const Lexicon& lexicon, double silence_weight);

// Tri-grapheme to grapheme transducer. Reading "l-c+r" emits c; states
// track the promised next center so any grapheme string has exactly one
// expansion.
Wfst BuildC(const GraphemeSet& gset);

// Tied-state to tri-grapheme transducer: per tri-grapheme a chain of
// `topology` emitting arcs resolved through the tree, then an epsilon
// return to the loop state. Self-loops are synthesized by the decoder.
Wfst BuildH(const DecisionTree& tree, int topology, const GraphemeSet& gset);

struct DecodingGraph {
  Wfst graph;  // input tied-state ids (ilabel - 1) or epsilon; output words
  int tied_state_count = 0;
  std::string mode;  // "independent" or "specific:<language>"
  std::string self_loop_policy;  // "unique-incoming-ilabel"
  std::map<std::string, std::string> component_checksums;  // H C L G

  void Save(const std::string& dir) const;
  static DecodingGraph Load(const std::string& dir);
};

// trim(H o (C o det(rmeps(L o G)))) with disambiguation symbols deleted
// right after determinization. The result is trimmed, input-arc-sorted,
// and satisfies the self-loop policy: at every state the incoming
// non-epsilon input labels agree.
DecodingGraph BuildDecodingGraph(const Wfst& h, const Wfst& c,
                                 const LexiconFst& l, const Wfst& g,
                                 const std::string& mode,
                                 int max_det_states = 1000000);

// Per-state self-loop labels under the unique-incoming-ilabel policy:
// the shared incoming label where one exists, else 0.
std::vector<int> SelfLoopLabels(const Wfst& graph);

}  // namespace gasr

#endif  // GASR_GRAPH_BUILDER_HPP_
