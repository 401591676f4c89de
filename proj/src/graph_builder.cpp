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

#include "gasr/graph_builder.hpp"

#include <filesystem>
#include <set>

#include "gasr/common.hpp"
#include "gasr/utf8.hpp"
#include "gasr/wfst_ops.hpp"

namespace gasr {

std::vector<std::string> CenterTokens(const GraphemeSet& gset) {
  std::vector<std::string> out{kSilenceToken};
  for (char32_t cp : gset.graphemes) out.push_back(Utf8Encode(cp));
  return out;
}

std::vector<std::string> ContextTokens(const GraphemeSet& gset) {
  std::vector<std::string> out{kBoundaryToken};
  for (const std::string& c : CenterTokens(gset)) out.push_back(c);
  return out;
}

SymbolTable MakeGraphemeSymbols(const GraphemeSet& gset) {
  SymbolTable syms;
  for (const std::string& c : CenterTokens(gset)) syms.AddSymbol(c);
  return syms;
}

SymbolTable MakeTrigraphemeSymbols(const GraphemeSet& gset) {
  SymbolTable syms;
  std::vector<std::string> centers = CenterTokens(gset);
  std::vector<std::string> contexts = ContextTokens(gset);
  for (const std::string& l : contexts)
    for (const std::string& c : centers)
      for (const std::string& r : contexts)
        syms.AddSymbol(l + "-" + c + "+" + r);
  return syms;
}

SymbolTable MakeTiedStateSymbols(int leaf_count) {
  SymbolTable syms;
  for (int k = 0; k < leaf_count; ++k)
    syms.AddSymbol("t" + std::to_string(k));
  return syms;
}

SymbolTable MakeWordSymbols(const Lexicon& lexicon) {
  SymbolTable syms;
  for (const auto& [word, prons] : lexicon.entries) {
    (void)prons;
    syms.AddSymbol(word);
  }
  return syms;
}

LexiconFst BuildL(const Lexicon& lexicon, double silence_weight) {
  if (lexicon.entries.empty()) throw Error("BuildL: empty lexicon");

  // A pronunciation needs a disambiguation symbol when it occurs more
  // than once or is a strict prefix of another pronunciation.
  std::map<Pronunciation, int> pron_count;
  for (const auto& [word, prons] : lexicon.entries) {
    (void)word;
    for (const Pronunciation& p : prons) pron_count[p]++;
  }
  std::set<Pronunciation> prefixes;
  for (const auto& [pron, n] : pron_count) {
    (void)n;
    for (size_t len = 1; len < pron.size(); ++len) {
      Pronunciation head(pron.begin(), pron.begin() + len);
      if (pron_count.count(head)) prefixes.insert(head);
    }
  }
  std::map<Pronunciation, int> occurrence;
  int max_disambig = 0;
  // disambig_of[(word, pron index)] in entry iteration order.
  std::map<std::pair<std::string, size_t>, int> disambig_of;
  for (const auto& [word, prons] : lexicon.entries) {
    for (size_t i = 0; i < prons.size(); ++i) {
      const Pronunciation& p = prons[i];
      if (p.empty())
        throw Error("BuildL: empty pronunciation for word '" + word + "'");
      if (pron_count[p] > 1 || prefixes.count(p)) {
        int k = ++occurrence[p];
        disambig_of[{word, i}] = k;
        if (k > max_disambig) max_disambig = k;
      }
    }
  }

  SymbolTable isyms = MakeGraphemeSymbols(lexicon.grapheme_set);
  LexiconFst result;
  result.num_disambig = max_disambig;
  result.first_disambig =
      max_disambig > 0 ? isyms.AddSymbol("#1") : 0;
  for (int k = 2; k <= max_disambig; ++k)
    isyms.AddSymbol("#" + std::to_string(k));
  SymbolTable osyms = MakeWordSymbols(lexicon);

  Wfst l(isyms, osyms);
  int loop = l.AddState();
  l.SetStart(loop);
  l.SetFinal(loop, 0.0);
  int sil = l.InputSymbols().FindId(kSilenceToken);
  l.AddArc(loop, Arc{sil, kEpsilonLabel, silence_weight, loop});

  for (const auto& [word, prons] : lexicon.entries) {
    int word_id = l.OutputSymbols().FindId(word);
    for (size_t i = 0; i < prons.size(); ++i) {
      const Pronunciation& p = prons[i];
      std::vector<int> labels;
      for (char32_t cp : p) {
        int id = l.InputSymbols().FindId(Utf8Encode(cp));
        if (id < 0)
          throw Error("BuildL: word '" + word + "' uses grapheme " +
                      CodepointNotation(cp) + " outside the symbol table");
        labels.push_back(id);
      }
      auto it = disambig_of.find({word, i});
      if (it != disambig_of.end())
        labels.push_back(result.first_disambig + it->second - 1);
      int src = loop;
      for (size_t j = 0; j < labels.size(); ++j) {
        int dst = j + 1 == labels.size() ? loop : l.AddState();
        int olabel = j == 0 ? word_id : kEpsilonLabel;
        l.AddArc(src, Arc{labels[j], olabel, 0.0, dst});
        src = dst;
      }
    }
  }
  result.fst = std::move(l);
  return result;
}

Wfst BuildC(const GraphemeSet& gset) {
  if (gset.graphemes.empty()) throw Error("BuildC: empty grapheme set");
  std::vector<std::string> centers = CenterTokens(gset);
  std::vector<std::string> contexts = ContextTokens(gset);
  SymbolTable isyms = MakeTrigraphemeSymbols(gset);
  SymbolTable osyms = MakeGraphemeSymbols(gset);

  std::map<std::string, int> center_idx;
  for (size_t i = 0; i < centers.size(); ++i) center_idx[centers[i]] = i;
  int nb = static_cast<int>(centers.size()) + 1;  // promised token slots

  Wfst c(isyms, osyms);
  int s0 = c.AddState();
  c.SetStart(s0);
  c.SetFinal(s0, 0.0);
  // State (a, b): grapheme a was emitted last, token b is promised
  // next; b may be the boundary token (slot nb - 1), which is final.
  auto state_of = [&](int a_idx, int b_slot) { return 1 + a_idx * nb + b_slot; };
  for (size_t a = 0; a < centers.size(); ++a)
    for (int b = 0; b < nb; ++b) {
      int s = c.AddState();
      (void)s;
      if (b == nb - 1) c.SetFinal(state_of(a, b), 0.0);
    }
  auto slot_of = [&](const std::string& token) {
    return token == kBoundaryToken ? nb - 1 : center_idx.at(token);
  };

  for (const std::string& ctr : centers)
    for (const std::string& r : contexts) {
      int in = c.InputSymbols().FindId(std::string(kBoundaryToken) + "-" +
                                       ctr + "+" + r);
      int out = c.OutputSymbols().FindId(ctr);
      c.AddArc(s0, Arc{in, out, 0.0, state_of(center_idx[ctr], slot_of(r))});
    }
  for (size_t a = 0; a < centers.size(); ++a)
    for (size_t b = 0; b < centers.size(); ++b)
      for (const std::string& r : contexts) {
        int in = c.InputSymbols().FindId(centers[a] + "-" + centers[b] + "+" +
                                         r);
        int out = c.OutputSymbols().FindId(centers[b]);
        c.AddArc(state_of(a, b), Arc{in, out, 0.0,
                                     state_of(b, slot_of(r))});
      }
  return c;
}

Wfst BuildH(const DecisionTree& tree, int topology, const GraphemeSet& gset) {
  if (topology < 1) throw Error("BuildH: topology must be >= 1");
  std::vector<std::string> centers = CenterTokens(gset);
  std::vector<std::string> contexts = ContextTokens(gset);
  SymbolTable isyms = MakeTiedStateSymbols(tree.leaf_count);
  SymbolTable osyms = MakeTrigraphemeSymbols(gset);

  Wfst h(isyms, osyms);
  int loop = h.AddState();
  h.SetStart(loop);
  h.SetFinal(loop, 0.0);

  for (const std::string& l : contexts)
    for (const std::string& c : centers)
      for (const std::string& r : contexts) {
        std::string tri = l + "-" + c + "+" + r;
        int tri_id = h.OutputSymbols().FindId(tri);
        int src = loop;
        for (int pos = 0; pos < topology; ++pos) {
          int tid;
          try {
            tid = tree.MapTrigrapheme(l, c, r, pos);
          } catch (const Error& e) {
            throw Error("BuildH: tri-grapheme " + tri + " unmapped: " +
                        e.what());
          }
          int dst = h.AddState();
          h.AddArc(src, Arc{tid + 1, pos == 0 ? tri_id : kEpsilonLabel, 0.0,
                            dst});
          src = dst;
        }
        h.AddArc(src, Arc{kEpsilonLabel, kEpsilonLabel, 0.0, loop});
      }
  return h;
}

namespace {

std::vector<int> IncomingLabels(const Wfst& graph, bool* ambiguous_any,
                                int* ambiguous_state) {
  std::vector<int> label(graph.NumStates(), 0);
  std::vector<char> ambiguous(graph.NumStates(), 0);
  for (int s = 0; s < graph.NumStates(); ++s)
    for (const Arc& arc : graph.ArcsAt(s)) {
      if (arc.ilabel == kEpsilonLabel) continue;
      if (label[arc.dest] == 0) {
        label[arc.dest] = arc.ilabel;
      } else if (label[arc.dest] != arc.ilabel) {
        ambiguous[arc.dest] = 1;
      }
    }
  if (ambiguous_any) *ambiguous_any = false;
  for (int s = 0; s < graph.NumStates(); ++s)
    if (ambiguous[s]) {
      label[s] = 0;
      if (ambiguous_any) {
        *ambiguous_any = true;
        *ambiguous_state = s;
      }
    }
  return label;
}

}  // namespace

std::vector<int> SelfLoopLabels(const Wfst& graph) {
  bool ambiguous = false;
  int state = -1;
  return IncomingLabels(graph, &ambiguous, &state);
}

DecodingGraph BuildDecodingGraph(const Wfst& h, const Wfst& c,
                                 const LexiconFst& l, const Wfst& g,
                                 const std::string& mode,
                                 int max_det_states) {
  DecodingGraph dg;
  dg.mode = mode;
  dg.self_loop_policy = "unique-incoming-ilabel";
  dg.tied_state_count = h.InputSymbols().NumSymbols() - 1;
  dg.component_checksums["H"] = HashHex(Fnv1a64(h.ToText()));
  dg.component_checksums["C"] = HashHex(Fnv1a64(c.ToText()));
  dg.component_checksums["L"] = HashHex(Fnv1a64(l.fst.ToText()));
  dg.component_checksums["G"] = HashHex(Fnv1a64(g.ToText()));

  auto stage = [](const char* name, auto&& fn) -> Wfst {
    try {
      return fn();
    } catch (const Error& e) {
      throw Error(std::string(name) + ": " + e.what());
    }
  };

  Wfst lg = stage("compose-LG", [&] {
    return Compose(l.fst, ArcSort(g, SortSide::kInput));
  });
  lg = stage("remove-epsilons", [&] { return RemoveEpsilons(lg); });
  Wfst det = stage("determinize", [&] {
    DeterminizeOptions opts;
    opts.max_states = max_det_states;
    return Determinize(lg, opts);
  });

  if (l.num_disambig > 0) {
    for (int s = 0; s < det.NumStates(); ++s)
      for (Arc& arc : det.MutableArcsAt(s))
        if (arc.ilabel >= l.first_disambig) arc.ilabel = kEpsilonLabel;
    SymbolTable clean;
    for (int id = 1; id < l.first_disambig; ++id)
      clean.AddSymbol(det.InputSymbols().FindSymbol(id));
    det.MutableInputSymbols() = clean;
  }
  det = ArcSort(det, SortSide::kInput);

  Wfst clg = stage("compose-CLG", [&] { return Compose(c, det); });
  clg = ArcSort(clg, SortSide::kInput);
  Wfst hclg = stage("compose-HCLG", [&] { return Compose(h, clg); });
  hclg = stage("trim", [&] { return Connect(hclg); });
  if (hclg.NumStates() == 0)
    throw Error("trim: decoding graph is empty (no accepting path)");
  hclg = ArcSort(hclg, SortSide::kInput);

  bool ambiguous = false;
  int state = -1;
  IncomingLabels(hclg, &ambiguous, &state);
  if (ambiguous)
    throw Error("BuildDecodingGraph: state " + std::to_string(state) +
                " has conflicting incoming input labels; self-loop policy "
                "does not apply");

  dg.graph = std::move(hclg);
  return dg;
}

void DecodingGraph::Save(const std::string& dir) const {
  std::filesystem::create_directories(dir);
  graph.Save(dir + "/graph.fst");
  WriteFileText(dir + "/tied.sym", graph.InputSymbols().ToText());
  WriteFileText(dir + "/words.sym", graph.OutputSymbols().ToText());
  std::string meta;
  for (const auto& [name, hash] : component_checksums)
    meta += "checksum." + name + "\t" + hash + "\n";
  meta += "mode\t" + mode + "\n";
  meta += "self_loop_policy\t" + self_loop_policy + "\n";
  meta += "tied_state_count\t" + std::to_string(tied_state_count) + "\n";
  WriteFileText(dir + "/meta", meta);
}

DecodingGraph DecodingGraph::Load(const std::string& dir) {
  DecodingGraph dg;
  SymbolTable tied = SymbolTable::Load(dir + "/tied.sym");
  SymbolTable words = SymbolTable::Load(dir + "/words.sym");
  dg.graph = Wfst::Load(dir + "/graph.fst", tied, words);
  for (const std::string& line : ReadLines(dir + "/meta")) {
    if (line.empty()) continue;
    std::vector<std::string> kv = SplitString(line, '\t');
    if (kv.size() != 2)
      throw StageInputError("graph meta: bad line '" + line + "'");
    if (kv[0] == "mode") {
      dg.mode = kv[1];
    } else if (kv[0] == "self_loop_policy") {
      dg.self_loop_policy = kv[1];
    } else if (kv[0] == "tied_state_count") {
      dg.tied_state_count = std::atoi(kv[1].c_str());
    } else if (kv[0].rfind("checksum.", 0) == 0) {
      dg.component_checksums[kv[0].substr(9)] = kv[1];
    } else {
      throw StageInputError("graph meta: unknown key '" + kv[0] + "'");
    }
  }
  return dg;
}

}  // namespace gasr
