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

#include "gasr/context_tree.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "gasr/common.hpp"
#include "gasr/utf8.hpp"

namespace gasr {

const char* kBoundaryToken = "<p>";
const char* kSilenceToken = "<sil>";

namespace {

constexpr double kVarianceFloor = 1e-4;
constexpr double kLn2Pi = 1.8378770664093454836;

std::string FormatDouble(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void ContextStats::Add(const VectorX& v) {
  if (count == 0) {
    sum = v;
    sumsq = v.array().square().matrix();
  } else {
    if (sum.size() != v.size())
      throw Error("ContextStats: feature dimension changed from " +
                  std::to_string(sum.size()) + " to " +
                  std::to_string(v.size()));
    sum += v;
    sumsq += v.array().square().matrix();
  }
  ++count;
}

void ContextStats::Merge(const ContextStats& o) {
  if (o.count == 0) return;
  if (count == 0) {
    *this = o;
    return;
  }
  if (sum.size() != o.sum.size())
    throw Error("ContextStats: cannot merge dimension " +
                std::to_string(o.sum.size()) + " into " +
                std::to_string(sum.size()));
  count += o.count;
  sum += o.sum;
  sumsq += o.sumsq;
}

void AccumulateStats(const std::vector<StatsKey>& alignment,
                     const MatrixX& features, StatsTable* table) {
  if (static_cast<long>(alignment.size()) != features.cols())
    throw Error("AccumulateStats: alignment covers " +
                std::to_string(alignment.size()) + " frames but features have " +
                std::to_string(features.cols()) + " columns");
  if (!table->empty()) {
    long dim = table->begin()->second.sum.size();
    if (features.rows() != dim)
      throw Error("AccumulateStats: feature dimension " +
                  std::to_string(features.rows()) +
                  " does not match the table's " + std::to_string(dim));
  }
  for (size_t t = 0; t < alignment.size(); ++t)
    (*table)[alignment[t]].Add(features.col(static_cast<long>(t)));
}

void MergeStats(const StatsTable& src, StatsTable* dst) {
  for (const auto& [key, stats] : src) (*dst)[key].Merge(stats);
}

std::string StatsToText(const StatsTable& table) {
  std::string out;
  for (const auto& [key, stats] : table) {
    out += key.left + " " + key.center + " " + key.right + " " +
           std::to_string(key.pos) + " " + std::to_string(stats.count);
    for (long d = 0; d < stats.sum.size(); ++d)
      out += " " + FormatDouble(stats.sum(d));
    for (long d = 0; d < stats.sumsq.size(); ++d)
      out += " " + FormatDouble(stats.sumsq(d));
    out += "\n";
  }
  return out;
}

StatsTable StatsFromText(const std::string& text) {
  StatsTable table;
  long dim = -1;
  size_t lineno = 0;
  for (const std::string& line : SplitString(text, '\n')) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f = SplitWhitespace(line);
    if (f.size() < 5 || (f.size() - 5) % 2 != 0)
      throw StageInputError("stats line " + std::to_string(lineno) +
                            ": expected 'l c r pos count sums sumsqs'");
    long d = static_cast<long>((f.size() - 5) / 2);
    if (dim < 0) dim = d;
    if (d != dim)
      throw StageInputError("stats line " + std::to_string(lineno) +
                            ": dimension " + std::to_string(d) +
                            " does not match " + std::to_string(dim));
    StatsKey key{f[0], f[1], f[2], std::atoi(f[3].c_str())};
    if (table.count(key))
      throw StageInputError("stats line " + std::to_string(lineno) +
                            ": duplicate key");
    ContextStats stats;
    stats.count = std::atol(f[4].c_str());
    stats.sum.resize(d);
    stats.sumsq.resize(d);
    for (long i = 0; i < d; ++i) {
      stats.sum(i) = std::strtod(f[5 + i].c_str(), nullptr);
      stats.sumsq(i) = std::strtod(f[5 + d + i].c_str(), nullptr);
    }
    table[key] = stats;
  }
  return table;
}

double GaussianLogLikelihood(const ContextStats& stats) {
  if (stats.count == 0) return 0.0;
  double n = static_cast<double>(stats.count);
  double acc = 0.0;
  for (long d = 0; d < stats.sum.size(); ++d) {
    double mean = stats.sum(d) / n;
    double var = stats.sumsq(d) / n - mean * mean;
    if (var < -1e-8)
      throw Error("GaussianLogLikelihood: negative variance " +
                  std::to_string(var) + " signals corrupt statistics");
    if (var < kVarianceFloor) var = kVarianceFloor;
    acc += 1.0 + kLn2Pi + std::log(var);
  }
  return -0.5 * n * acc;
}

std::vector<GraphemeQuestion> GenerateQuestions(
    const std::vector<GraphemeSet>& languages) {
  std::vector<GraphemeQuestion> out;
  auto token_set = [](const std::vector<char32_t>& cps, size_t lo, size_t hi) {
    std::set<std::string> s;
    for (size_t i = lo; i < hi; ++i) s.insert(Utf8Encode(cps[i]));
    return s;
  };
  for (const GraphemeSet& lang : languages) {
    std::string tag = JoinStrings(lang.language_ids, "+");
    GraphemeQuestion full;
    full.name = "lang:" + tag;
    full.members = token_set(lang.graphemes, 0, lang.graphemes.size());
    out.push_back(std::move(full));
    for (const CodepointRange& range : lang.source_ranges) {
      std::vector<char32_t> in_range;
      for (char32_t cp : lang.graphemes)
        if (range.Contains(cp)) in_range.push_back(cp);
      if (in_range.size() < 2) continue;
      size_t half = (in_range.size() + 1) / 2;
      std::string label = "block:" + tag + ":" + CodepointNotation(range.lo) +
                          "-" + CodepointNotation(range.hi);
      out.push_back({label + ":lo", token_set(in_range, 0, half)});
      out.push_back({label + ":hi", token_set(in_range, half, in_range.size())});
    }
  }
  std::set<char32_t> all;
  for (const GraphemeSet& lang : languages)
    all.insert(lang.graphemes.begin(), lang.graphemes.end());
  for (char32_t cp : all)
    out.push_back({"g:" + CodepointNotation(cp), {Utf8Encode(cp)}});
  return out;
}

int DecisionTree::MapTrigrapheme(const std::string& left,
                                 const std::string& center,
                                 const std::string& right, int pos) const {
  auto it = roots.find({center, pos});
  if (it == roots.end())
    throw Error("MapTrigrapheme: no root for center '" + center +
                "' position " + std::to_string(pos));
  int n = it->second;
  while (nodes[n].question >= 0) {
    const TreeNode& node = nodes[n];
    const std::string& token = node.side == 0 ? left : right;
    bool yes = questions[node.question].members.count(token) != 0;
    n = yes ? node.yes : node.no;
  }
  return nodes[n].leaf_id;
}

namespace {

// Growth-time view of a leaf: the stats entries routed to it plus the
// best split found for it, computed once at creation.
struct LeafWork {
  int node_id = -1;
  std::vector<const std::pair<const StatsKey, ContextStats>*> members;
  double like = 0.0;
  double best_gain = -1.0;
  int best_candidate = -1;  // 2 * question + side
};

ContextStats Pool(
    const std::vector<const std::pair<const StatsKey, ContextStats>*>& members) {
  ContextStats pooled;
  for (const auto* m : members) pooled.Merge(m->second);
  return pooled;
}

void EvaluateLeaf(const std::vector<GraphemeQuestion>& questions,
                  LeafWork* leaf) {
  leaf->like = GaussianLogLikelihood(Pool(leaf->members));
  leaf->best_gain = -1.0;
  leaf->best_candidate = -1;
  int num_candidates = static_cast<int>(questions.size()) * 2;
  for (int cand = 0; cand < num_candidates; ++cand) {
    const GraphemeQuestion& q = questions[cand / 2];
    int side = cand % 2;
    ContextStats yes, no;
    for (const auto* m : leaf->members) {
      const std::string& token = side == 0 ? m->first.left : m->first.right;
      if (q.members.count(token))
        yes.Merge(m->second);
      else
        no.Merge(m->second);
    }
    if (yes.count == 0 || no.count == 0) continue;
    double gain = GaussianLogLikelihood(yes) + GaussianLogLikelihood(no) -
                  leaf->like;
    // Variance flooring can push a tiny negative through the formula.
    if (gain < 0.0) gain = 0.0;
    if (gain > leaf->best_gain) {
      leaf->best_gain = gain;
      leaf->best_candidate = cand;
    }
  }
}

void AssignLeafIds(DecisionTree* tree) {
  int next = 0;
  for (auto& [key, root] : tree->roots) {
    (void)key;
    std::vector<int> stack{root};
    while (!stack.empty()) {
      int n = stack.back();
      stack.pop_back();
      TreeNode& node = tree->nodes[n];
      if (node.question < 0) {
        node.leaf_id = next++;
      } else {
        stack.push_back(node.no);
        stack.push_back(node.yes);
      }
    }
  }
  tree->leaf_count = next;
}

}  // namespace

DecisionTree GrowTree(const StatsTable& stats,
                      const std::vector<GraphemeQuestion>& questions,
                      int max_leaves, double min_gain) {
  if (stats.empty()) throw Error("GrowTree: empty stats table");
  if (questions.empty()) throw Error("GrowTree: empty question list");

  std::set<std::string> centers;
  std::set<int> positions;
  for (const auto& [key, s] : stats) {
    (void)s;
    centers.insert(key.center);
    positions.insert(key.pos);
  }
  long budget = static_cast<long>(centers.size()) *
                static_cast<long>(positions.size());
  if (max_leaves < budget)
    throw Error("GrowTree: max_leaves " + std::to_string(max_leaves) +
                " is below the " + std::to_string(budget) +
                " roots (centers x positions)");

  DecisionTree tree;
  tree.questions = questions;
  std::vector<LeafWork> leaves;
  std::map<std::pair<std::string, int>,
           std::vector<const std::pair<const StatsKey, ContextStats>*>>
      by_root;
  for (const auto& entry : stats)
    by_root[{entry.first.center, entry.first.pos}].push_back(&entry);
  for (auto& [key, members] : by_root) {
    int node_id = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back(TreeNode{});
    tree.roots[key] = node_id;
    LeafWork leaf;
    leaf.node_id = node_id;
    leaf.members = std::move(members);
    EvaluateLeaf(tree.questions, &leaf);
    leaves.push_back(std::move(leaf));
  }

  int leaf_count = static_cast<int>(leaves.size());
  while (leaf_count < max_leaves) {
    // Pick the splittable leaf with the largest gain; ties go to the
    // lowest candidate index, then the lowest node id.
    int best = -1;
    for (int i = 0; i < static_cast<int>(leaves.size()); ++i) {
      if (leaves[i].best_candidate < 0) continue;
      if (best < 0) {
        best = i;
        continue;
      }
      const LeafWork& a = leaves[i];
      const LeafWork& b = leaves[best];
      if (a.best_gain > b.best_gain ||
          (a.best_gain == b.best_gain &&
           (a.best_candidate < b.best_candidate ||
            (a.best_candidate == b.best_candidate &&
             a.node_id < b.node_id))))
        best = i;
    }
    if (best < 0 || leaves[best].best_gain < min_gain) break;

    LeafWork parent = std::move(leaves[best]);
    leaves.erase(leaves.begin() + best);
    int qi = parent.best_candidate / 2;
    int side = parent.best_candidate % 2;
    const GraphemeQuestion& q = tree.questions[qi];

    LeafWork yes_leaf, no_leaf;
    for (const auto* m : parent.members) {
      const std::string& token = side == 0 ? m->first.left : m->first.right;
      (q.members.count(token) ? yes_leaf : no_leaf).members.push_back(m);
    }
    yes_leaf.node_id = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back(TreeNode{});
    no_leaf.node_id = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back(TreeNode{});

    TreeNode& node = tree.nodes[parent.node_id];
    node.question = qi;
    node.side = side;
    node.yes = yes_leaf.node_id;
    node.no = no_leaf.node_id;

    EvaluateLeaf(tree.questions, &yes_leaf);
    EvaluateLeaf(tree.questions, &no_leaf);
    leaves.push_back(std::move(yes_leaf));
    leaves.push_back(std::move(no_leaf));
    ++leaf_count;
  }

  AssignLeafIds(&tree);
  return tree;
}

namespace {

void WriteSexp(const DecisionTree& tree, int n, std::string* out) {
  const TreeNode& node = tree.nodes[n];
  if (node.question < 0) {
    *out += "(leaf " + std::to_string(node.leaf_id) + ")";
    return;
  }
  *out += "(split ";
  *out += node.side == 0 ? 'l' : 'r';
  *out += ' ' + std::to_string(node.question) + ' ';
  WriteSexp(tree, node.yes, out);
  *out += ' ';
  WriteSexp(tree, node.no, out);
  *out += ')';
}

struct SexpTokens {
  std::vector<std::string> tokens;
  size_t next = 0;

  const std::string& Take() {
    if (next >= tokens.size())
      throw StageInputError("tree: unexpected end of expression");
    return tokens[next++];
  }
  void Expect(const std::string& t) {
    if (Take() != t)
      throw StageInputError("tree: expected '" + t + "' in expression");
  }
};

int ParseSexp(SexpTokens* toks, DecisionTree* tree) {
  toks->Expect("(");
  const std::string& kind = toks->Take();
  int id = static_cast<int>(tree->nodes.size());
  tree->nodes.push_back(TreeNode{});
  if (kind == "leaf") {
    tree->nodes[id].leaf_id = std::atoi(toks->Take().c_str());
  } else if (kind == "split") {
    const std::string& side = toks->Take();
    if (side != "l" && side != "r")
      throw StageInputError("tree: split side must be l or r");
    int s = side == "r" ? 1 : 0;
    int q = std::atoi(toks->Take().c_str());
    if (q < 0 || q >= static_cast<int>(tree->questions.size()))
      throw StageInputError("tree: question index " + std::to_string(q) +
                            " out of range");
    int yes = ParseSexp(toks, tree);
    int no = ParseSexp(toks, tree);
    tree->nodes[id].question = q;
    tree->nodes[id].side = s;
    tree->nodes[id].yes = yes;
    tree->nodes[id].no = no;
  } else {
    throw StageInputError("tree: unknown node kind '" + kind + "'");
  }
  toks->Expect(")");
  return id;
}

}  // namespace

std::string TreeToText(const DecisionTree& tree) {
  std::string out = "leaf_count " + std::to_string(tree.leaf_count) + "\n";
  out += "questions " + std::to_string(tree.questions.size()) + "\n";
  for (const GraphemeQuestion& q : tree.questions) {
    out += q.name;
    for (const std::string& m : q.members) out += " " + m;
    out += "\n";
  }
  out += "roots " + std::to_string(tree.roots.size()) + "\n";
  for (const auto& [key, root] : tree.roots) {
    out += key.first + " " + std::to_string(key.second) + " ";
    WriteSexp(tree, root, &out);
    out += "\n";
  }
  return out;
}

DecisionTree TreeFromText(const std::string& text) {
  std::vector<std::string> lines = SplitString(text, '\n');
  size_t ln = 0;
  auto header = [&](const std::string& word) -> long {
    if (ln >= lines.size())
      throw StageInputError("tree: missing '" + word + "' header");
    std::vector<std::string> f = SplitWhitespace(lines[ln]);
    if (f.size() != 2 || f[0] != word)
      throw StageInputError("tree line " + std::to_string(ln + 1) +
                            ": expected '" + word + " N'");
    ++ln;
    return std::atol(f[1].c_str());
  };

  DecisionTree tree;
  long declared_leaves = header("leaf_count");
  long num_questions = header("questions");
  for (long i = 0; i < num_questions; ++i) {
    if (ln >= lines.size())
      throw StageInputError("tree: question list truncated");
    std::vector<std::string> f = SplitWhitespace(lines[ln]);
    if (f.empty())
      throw StageInputError("tree line " + std::to_string(ln + 1) +
                            ": empty question");
    GraphemeQuestion q;
    q.name = f[0];
    q.members.insert(f.begin() + 1, f.end());
    tree.questions.push_back(std::move(q));
    ++ln;
  }
  long num_roots = header("roots");
  for (long i = 0; i < num_roots; ++i) {
    if (ln >= lines.size()) throw StageInputError("tree: root list truncated");
    std::string line = lines[ln];
    // Pad parens so a whitespace split tokenizes the expression.
    std::string padded;
    for (char c : line) {
      if (c == '(' || c == ')') {
        padded += ' ';
        padded += c;
        padded += ' ';
      } else {
        padded += c;
      }
    }
    SexpTokens toks;
    toks.tokens = SplitWhitespace(padded);
    if (toks.tokens.size() < 3)
      throw StageInputError("tree line " + std::to_string(ln + 1) +
                            ": expected 'center pos (expr)'");
    std::string center = toks.Take();
    int pos = std::atoi(toks.Take().c_str());
    int root = ParseSexp(&toks, &tree);
    if (toks.next != toks.tokens.size())
      throw StageInputError("tree line " + std::to_string(ln + 1) +
                            ": trailing tokens");
    tree.roots[{center, pos}] = root;
    ++ln;
  }
  std::set<int> leaf_ids;
  int leaf_nodes = 0;
  for (const TreeNode& node : tree.nodes)
    if (node.question < 0) {
      ++leaf_nodes;
      leaf_ids.insert(node.leaf_id);
    }
  bool dense = static_cast<long>(leaf_ids.size()) == declared_leaves &&
               leaf_nodes == declared_leaves &&
               (leaf_ids.empty() ||
                (*leaf_ids.begin() == 0 &&
                 *leaf_ids.rbegin() == declared_leaves - 1));
  if (!dense)
    throw StageInputError("tree: leaf ids are not dense 0.." +
                          std::to_string(declared_leaves - 1));
  tree.leaf_count = static_cast<int>(declared_leaves);
  return tree;
}

std::vector<Trigrapheme> ExpandTrigraphemes(
    const std::vector<std::string>& tokens) {
  std::vector<Trigrapheme> out;
  size_t n = tokens.size();
  for (size_t i = 0; i < n; ++i) {
    Trigrapheme tg;
    tg.left = i > 0 ? tokens[i - 1] : kBoundaryToken;
    tg.center = tokens[i];
    tg.right = i + 1 < n ? tokens[i + 1] : kBoundaryToken;
    out.push_back(std::move(tg));
  }
  return out;
}

std::vector<StatsKey> AlignUniform(const std::vector<std::string>& tokens,
                                   int topology, int num_frames) {
  if (topology < 1) throw Error("AlignUniform: topology must be >= 1");
  if (num_frames < 0) throw Error("AlignUniform: negative frame count");
  if (tokens.empty()) {
    if (num_frames > 0)
      throw Error("AlignUniform: frames but no tokens to align");
    return {};
  }
  std::vector<Trigrapheme> units = ExpandTrigraphemes(tokens);
  long slots = static_cast<long>(units.size()) * topology;
  if (num_frames < slots)
    throw Error("AlignUniform: " + std::to_string(num_frames) +
                " frames cannot cover " + std::to_string(slots) +
                " positions");
  std::vector<StatsKey> out;
  out.reserve(num_frames);
  for (long t = 0; t < num_frames; ++t) {
    long slot = t * slots / num_frames;
    const Trigrapheme& u = units[slot / topology];
    out.push_back(StatsKey{u.left, u.center, u.right,
                           static_cast<int>(slot % topology)});
  }
  return out;
}

}  // namespace gasr
