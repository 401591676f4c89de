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

#ifndef GASR_CONTEXT_TREE_HPP_
#define GASR_CONTEXT_TREE_HPP_

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "gasr/grapheme_set.hpp"
#include "gasr/types.hpp"

namespace gasr {

// Context tokens are UTF-8 strings: a single grapheme, the boundary
// padding token, or the silence token.
extern const char* kBoundaryToken;  // "<p>"
extern const char* kSilenceToken;   // "<sil>"

// One context-dependent grapheme state: left context, center, right
// context, and the position within the center's state chain.
struct StatsKey {
  std::string left;
  std::string center;
  std::string right;
  int pos = 0;

  bool operator<(const StatsKey& o) const {
    if (left != o.left) return left < o.left;
    if (center != o.center) return center < o.center;
    if (right != o.right) return right < o.right;
    return pos < o.pos;
  }
  bool operator==(const StatsKey& o) const {
    return left == o.left && center == o.center && right == o.right &&
           pos == o.pos;
  }
};

// Diagonal-Gaussian sufficient statistics. Merging is elementwise
// addition, so accumulation order never matters.
struct ContextStats {
  long count = 0;
  VectorX sum;
  VectorX sumsq;

  void Add(const VectorX& v);
  void Merge(const ContextStats& o);
};

using StatsTable = std::map<StatsKey, ContextStats>;

// Adds one utterance: alignment[t] labels column t of features.
void AccumulateStats(const std::vector<StatsKey>& alignment,
                     const MatrixX& features, StatsTable* table);

void MergeStats(const StatsTable& src, StatsTable* dst);

// Sorted text form, one key per line:
// left center right pos count sum_0..sum_{d-1} sumsq_0..sumsq_{d-1}.
std::string StatsToText(const StatsTable& table);
StatsTable StatsFromText(const std::string& text);

// Log-likelihood of pooling the stats into one diagonal Gaussian,
// -0.5 * n * sum_d (1 + ln(2*pi) + ln var_d) with a variance floor.
// Empty stats score zero.
double GaussianLogLikelihood(const ContextStats& stats);

struct GraphemeQuestion {
  std::string name;
  std::set<std::string> members;
};

// Question inventory for tree growth: per language the full grapheme
// set and a low/high half of each source range, then one singleton per
// grapheme of the union.
std::vector<GraphemeQuestion> GenerateQuestions(
    const std::vector<GraphemeSet>& languages);

struct TreeNode {
  int question = -1;  // index into DecisionTree::questions; -1 at leaves
  int side = 0;       // 0 asks about the left context, 1 about the right
  int yes = -1;
  int no = -1;
  int leaf_id = -1;  // dense tied-state id, valid at leaves only
};

// Grown tree: one root per (center, position) pair seen in the stats.
// Tokens outside a question's member set, the boundary token included,
// follow the "no" branch.
struct DecisionTree {
  std::vector<GraphemeQuestion> questions;
  std::map<std::pair<std::string, int>, int> roots;
  std::vector<TreeNode> nodes;
  int leaf_count = 0;

  int MapTrigrapheme(const std::string& left, const std::string& center,
                     const std::string& right, int pos) const;
};

DecisionTree GrowTree(const StatsTable& stats,
                      const std::vector<GraphemeQuestion>& questions,
                      int max_leaves, double min_gain);

// S-expression text form with the question inventory embedded.
std::string TreeToText(const DecisionTree& tree);
DecisionTree TreeFromText(const std::string& text);

// Tri-grapheme expansion of a token sequence: unit i pairs tokens[i]
// with its neighbors, padded with the boundary token at the edges.
struct Trigrapheme {
  std::string left;
  std::string center;
  std::string right;
};
std::vector<Trigrapheme> ExpandTrigraphemes(
    const std::vector<std::string>& tokens);

// Synthetic alignment for tests and the oracle scorer: spreads
// num_frames uniformly over the units' positions, in order. Each unit
// contributes `topology` consecutive positions.
std::vector<StatsKey> AlignUniform(const std::vector<std::string>& tokens,
                                   int topology, int num_frames);

}  // namespace gasr

#endif  // GASR_CONTEXT_TREE_HPP_
