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

#include "gasr/decoder.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "gasr/common.hpp"
#include "gasr/utf8.hpp"
#include "gasr/wfst.hpp"

namespace gasr {

OracleScorer::OracleScorer(std::vector<int> reference, int num_tied_states,
                           double margin, double noise, Rng* rng)
    : reference_(std::move(reference)),
      num_tied_states_(num_tied_states),
      margin_(margin) {
  if (num_tied_states_ < 1)
    throw Error("OracleScorer: need at least one tied state");
  if (margin_ <= 0.0) throw Error("OracleScorer: margin must be positive");
  if (noise < 0.0) throw Error("OracleScorer: noise must be non-negative");
  for (int id : reference_) {
    if (id < 0 || id >= num_tied_states_)
      throw Error("OracleScorer: reference id " + std::to_string(id) +
                  " outside [0, " + std::to_string(num_tied_states_) + ")");
  }
  if (noise > 0.0) {
    if (rng == nullptr)
      throw Error("OracleScorer: noise requested without an rng");
    // Frame-major fill so the draw order is part of the contract.
    noise_.resize(num_tied_states_, static_cast<int>(reference_.size()));
    for (int t = 0; t < noise_.cols(); ++t)
      for (int s = 0; s < noise_.rows(); ++s)
        noise_(s, t) = rng->Uniform(-noise, noise);
  }
}

VectorX OracleScorer::Scores(int t) const {
  if (t < 0 || t >= NumFrames())
    throw Error("OracleScorer: frame " + std::to_string(t) +
                " outside [0, " + std::to_string(NumFrames()) + ")");
  VectorX scores = VectorX::Constant(num_tied_states_, -margin_);
  scores[reference_[t]] = 0.0;
  if (noise_.size() > 0) scores += noise_.col(t);
  return scores;
}

namespace {

struct Trace {
  int prev;
  int ilabel;
  int olabel;
};

struct Token {
  double cost = 0.0;
  int trace = -1;
};

void CheckDecodeInputs(const DecodingGraph& graph,
                       const AcousticScorer& scorer, int num_frames,
                       const char* name) {
  const Wfst& fst = graph.graph;
  if (fst.NumStates() == 0 || fst.Start() < 0)
    throw Error(std::string(name) + ": graph has no start state");
  if (scorer.NumTiedStates() != graph.tied_state_count)
    throw Error(std::string(name) + ": scorer covers " +
                std::to_string(scorer.NumTiedStates()) +
                " tied states, graph expects " +
                std::to_string(graph.tied_state_count));
  if (num_frames < 0 || num_frames > scorer.NumFrames())
    throw Error(std::string(name) + ": num_frames " +
                std::to_string(num_frames) + " outside [0, " +
                std::to_string(scorer.NumFrames()) + "]");
  for (int s = 0; s < fst.NumStates(); ++s) {
    for (const Arc& arc : fst.ArcsAt(s)) {
      if (arc.ilabel > graph.tied_state_count)
        throw Error(std::string(name) + ": input label " +
                    std::to_string(arc.ilabel) +
                    " exceeds the tied-state count");
    }
  }
}

// Relaxes a candidate into the frontier. Only strict improvements
// overwrite, so on ties the earliest writer keeps the slot.
void Relax(int dest, double cost, int prev_trace, int ilabel, int olabel,
           std::map<int, Token>* frontier, std::vector<Trace>* arena) {
  auto it = frontier->find(dest);
  if (it != frontier->end() && it->second.cost <= cost) return;
  arena->push_back({prev_trace, ilabel, olabel});
  Token tok{cost, static_cast<int>(arena->size()) - 1};
  if (it == frontier->end())
    frontier->emplace(dest, tok);
  else
    it->second = tok;
}

// Expands epsilon-input arcs cheapest-first until no token improves.
// Weights are non-negative, so each state settles at its final cost the
// first time it pops.
void EpsilonClosure(const Wfst& fst, std::map<int, Token>* frontier,
                    std::vector<Trace>* arena) {
  using Entry = std::pair<double, int>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> queue;
  for (const auto& [state, tok] : *frontier) queue.push({tok.cost, state});
  while (!queue.empty()) {
    auto [cost, state] = queue.top();
    queue.pop();
    const Token& tok = frontier->at(state);
    if (cost > tok.cost) continue;  // superseded entry
    for (const Arc& arc : fst.ArcsAt(state)) {
      if (arc.ilabel != kEpsilonLabel) continue;
      double next = cost + arc.weight;
      size_t before = arena->size();
      Relax(arc.dest, next, tok.trace, kEpsilonLabel, arc.olabel, frontier,
            arena);
      if (arena->size() != before) queue.push({next, arc.dest});
    }
  }
}

Hypothesis BuildHypothesis(const Wfst& fst, const std::vector<Trace>& arena,
                           int trace, double total_score) {
  std::vector<int> chain;
  for (int i = trace; i >= 0; i = arena[i].prev) chain.push_back(i);
  std::reverse(chain.begin(), chain.end());
  Hypothesis hyp;
  hyp.total_score = total_score;
  for (int i : chain) {
    if (arena[i].ilabel != kEpsilonLabel)
      hyp.alignment.push_back(arena[i].ilabel - 1);
    if (arena[i].olabel != kEpsilonLabel)
      hyp.words.push_back(fst.OutputSymbols().FindSymbol(arena[i].olabel));
  }
  return hyp;
}

}  // namespace

Hypothesis Decode(const DecodingGraph& graph, const AcousticScorer& scorer,
                  int num_frames, const DecodeOptions& opts) {
  CheckDecodeInputs(graph, scorer, num_frames, "Decode");
  if (opts.beam <= 0.0) throw Error("Decode: beam must be positive");
  const Wfst& fst = graph.graph;
  std::vector<int> self_loops = SelfLoopLabels(fst);

  std::vector<Trace> arena;
  std::map<int, Token> active;
  active.emplace(fst.Start(), Token{0.0, -1});
  EpsilonClosure(fst, &active, &arena);

  for (int t = 0; t < num_frames; ++t) {
    VectorX scores = scorer.Scores(t);
    std::map<int, Token> next;
    for (const auto& [state, tok] : active) {
      int loop_label = self_loops[state];
      if (loop_label != kEpsilonLabel) {
        double cost =
            tok.cost + opts.acoustic_scale * -scores[loop_label - 1];
        Relax(state, cost, tok.trace, loop_label, kEpsilonLabel, &next,
              &arena);
      }
      for (const Arc& arc : fst.ArcsAt(state)) {
        if (arc.ilabel == kEpsilonLabel) continue;
        double cost = tok.cost + arc.weight +
                      opts.acoustic_scale * -scores[arc.ilabel - 1];
        Relax(arc.dest, cost, tok.trace, arc.ilabel, arc.olabel, &next,
              &arena);
      }
    }
    if (next.empty())
      throw SearchFailure("Decode: no active tokens after frame " +
                          std::to_string(t));
    EpsilonClosure(fst, &next, &arena);

    double best = kInfinityWeight;
    for (const auto& [state, tok] : next) best = std::min(best, tok.cost);
    for (auto it = next.begin(); it != next.end();) {
      if (it->second.cost > best + opts.beam)
        it = next.erase(it);
      else
        ++it;
    }
    active = std::move(next);
  }

  double best_cost = kInfinityWeight;
  int best_trace = -1;
  bool found = false;
  for (const auto& [state, tok] : active) {
    if (!fst.IsFinal(state)) continue;
    double cost = tok.cost + fst.Final(state);
    if (!found || cost < best_cost) {
      found = true;
      best_cost = cost;
      best_trace = tok.trace;
    }
  }
  if (!found) throw SearchFailure("Decode: no reachable final state");
  return BuildHypothesis(fst, arena, best_trace, best_cost);
}

Hypothesis BruteForceDecode(const DecodingGraph& graph,
                            const AcousticScorer& scorer, int num_frames,
                            double acoustic_scale) {
  CheckDecodeInputs(graph, scorer, num_frames, "BruteForceDecode");
  const Wfst& fst = graph.graph;
  int n = fst.NumStates();
  std::vector<int> self_loops = SelfLoopLabels(fst);

  std::vector<Trace> arena;
  std::vector<double> cost(n, kInfinityWeight);
  std::vector<int> trace(n, -1);
  cost[fst.Start()] = 0.0;

  // Epsilon settlement by repeated full sweeps. Strict improvement
  // only, so zero-weight epsilon cycles terminate.
  auto settle = [&]() {
    bool changed = true;
    while (changed) {
      changed = false;
      for (int s = 0; s < n; ++s) {
        if (cost[s] == kInfinityWeight) continue;
        for (const Arc& arc : fst.ArcsAt(s)) {
          if (arc.ilabel != kEpsilonLabel) continue;
          double next = cost[s] + arc.weight;
          if (next < cost[arc.dest]) {
            arena.push_back({trace[s], kEpsilonLabel, arc.olabel});
            cost[arc.dest] = next;
            trace[arc.dest] = static_cast<int>(arena.size()) - 1;
            changed = true;
          }
        }
      }
    }
  };
  settle();

  for (int t = 0; t < num_frames; ++t) {
    VectorX scores = scorer.Scores(t);
    std::vector<double> next_cost(n, kInfinityWeight);
    std::vector<int> next_trace(n, -1);
    bool any = false;
    for (int s = 0; s < n; ++s) {
      if (cost[s] == kInfinityWeight) continue;
      if (self_loops[s] != kEpsilonLabel) {
        double c = cost[s] + acoustic_scale * -scores[self_loops[s] - 1];
        if (c < next_cost[s]) {
          arena.push_back({trace[s], self_loops[s], kEpsilonLabel});
          next_cost[s] = c;
          next_trace[s] = static_cast<int>(arena.size()) - 1;
          any = true;
        }
      }
      for (const Arc& arc : fst.ArcsAt(s)) {
        if (arc.ilabel == kEpsilonLabel) continue;
        double c = cost[s] + arc.weight +
                   acoustic_scale * -scores[arc.ilabel - 1];
        if (c < next_cost[arc.dest]) {
          arena.push_back({trace[s], arc.ilabel, arc.olabel});
          next_cost[arc.dest] = c;
          next_trace[arc.dest] = static_cast<int>(arena.size()) - 1;
          any = true;
        }
      }
    }
    if (!any)
      throw SearchFailure("BruteForceDecode: no active tokens after frame " +
                          std::to_string(t));
    cost = std::move(next_cost);
    trace = std::move(next_trace);
    settle();
  }

  double best_cost = kInfinityWeight;
  int best_trace = -1;
  bool found = false;
  for (int s = 0; s < n; ++s) {
    if (cost[s] == kInfinityWeight || !fst.IsFinal(s)) continue;
    double total = cost[s] + fst.Final(s);
    if (!found || total < best_cost) {
      found = true;
      best_cost = total;
      best_trace = trace[s];
    }
  }
  if (!found) throw SearchFailure("BruteForceDecode: no reachable final state");
  return BuildHypothesis(fst, arena, best_trace, best_cost);
}

std::vector<int> ReferenceTiedAlignment(const std::vector<std::string>& words,
                                        const Lexicon& lexicon,
                                        const DecisionTree& tree,
                                        int topology, int frames_per_state) {
  if (topology < 1)
    throw Error("ReferenceTiedAlignment: topology must be >= 1");
  if (frames_per_state < 1)
    throw Error("ReferenceTiedAlignment: frames_per_state must be >= 1");
  std::vector<std::string> tokens;
  for (const std::string& word : words) {
    auto it = lexicon.entries.find(word);
    if (it == lexicon.entries.end() || it->second.empty())
      throw Error("ReferenceTiedAlignment: word '" + word +
                  "' not in lexicon");
    for (char32_t cp : it->second.front()) tokens.push_back(Utf8Encode(cp));
  }
  if (tokens.empty())
    throw Error("ReferenceTiedAlignment: empty token sequence");

  int num_frames =
      static_cast<int>(tokens.size()) * topology * frames_per_state;
  std::vector<StatsKey> keys = AlignUniform(tokens, topology, num_frames);
  std::vector<int> tied;
  tied.reserve(keys.size());
  for (const StatsKey& key : keys)
    tied.push_back(
        tree.MapTrigrapheme(key.left, key.center, key.right, key.pos));
  return tied;
}

}  // namespace gasr
