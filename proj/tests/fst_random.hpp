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

// Random transducer generator plus path-set comparison helpers for
// checking the machine operations against exhaustive enumeration.

#ifndef GASR_TESTS_FST_RANDOM_HPP_
#define GASR_TESTS_FST_RANDOM_HPP_

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "gasr/rng.hpp"
#include "gasr/symbol_table.hpp"
#include "gasr/wfst.hpp"
#include "gasr/wfst_ops.hpp"

namespace gasr_tests {

inline gasr::SymbolTable MakeLetterSymbols(const std::string& prefix,
                                           int count) {
  gasr::SymbolTable syms;
  for (int i = 0; i < count; ++i)
    syms.AddSymbol(prefix + std::to_string(i));
  return syms;
}

struct RandomFstOptions {
  int max_states = 6;
  int max_arcs = 10;
  int num_ilabels = 3;
  int num_olabels = 3;
  bool allow_eps = true;
  // Forward-only arcs; guarantees determinizability.
  bool acyclic = false;
  bool eps_free_input = false;
  double final_prob = 0.4;
};

// Arc weights are strictly positive so epsilon cycles are always legal
// for epsilon removal.
inline gasr::Wfst MakeRandomFst(gasr::Rng* rng, const RandomFstOptions& opts,
                                gasr::SymbolTable isyms,
                                gasr::SymbolTable osyms) {
  gasr::Wfst fst(std::move(isyms), std::move(osyms));
  int num_states = static_cast<int>(rng->UniformInt(1, opts.max_states));
  for (int i = 0; i < num_states; ++i) fst.AddState();
  fst.SetStart(0);

  bool any_final = false;
  for (int s = 0; s < num_states; ++s) {
    if (rng->Uniform() < opts.final_prob) {
      fst.SetFinal(s, rng->Uniform(0.0, 2.0));
      any_final = true;
    }
  }
  if (!any_final) fst.SetFinal(num_states - 1, rng->Uniform(0.0, 2.0));

  int num_arcs = static_cast<int>(rng->UniformInt(0, opts.max_arcs));
  for (int i = 0; i < num_arcs; ++i) {
    int src, dst;
    if (opts.acyclic) {
      if (num_states < 2) break;
      src = static_cast<int>(rng->UniformInt(0, num_states - 2));
      dst = static_cast<int>(rng->UniformInt(src + 1, num_states - 1));
    } else {
      src = static_cast<int>(rng->UniformInt(0, num_states - 1));
      dst = static_cast<int>(rng->UniformInt(0, num_states - 1));
    }
    int ilo = (opts.allow_eps && !opts.eps_free_input) ? 0 : 1;
    int olo = opts.allow_eps ? 0 : 1;
    gasr::Arc arc;
    arc.ilabel = static_cast<int>(rng->UniformInt(ilo, opts.num_ilabels));
    arc.olabel = static_cast<int>(rng->UniformInt(olo, opts.num_olabels));
    arc.weight = rng->Uniform(0.05, 3.0);
    arc.dest = dst;
    fst.AddArc(src, arc);
  }
  return fst;
}

using PathKey = std::pair<std::vector<int>, std::vector<int>>;

// Cheapest weight per (input string, output string). The tropical
// weight of the relation, which every rational operation preserves.
inline std::map<PathKey, double> MinWeightPaths(
    const std::vector<gasr::Path>& paths) {
  std::map<PathKey, double> out;
  for (const auto& p : paths) {
    PathKey key{p.ilabels, p.olabels};
    auto it = out.find(key);
    if (it == out.end())
      out.emplace(std::move(key), p.weight);
    else if (p.weight < it->second)
      it->second = p.weight;
  }
  return out;
}

inline bool MinPathMapsEqual(const std::map<PathKey, double>& a,
                             const std::map<PathKey, double>& b, double tol,
                             std::string* why = nullptr) {
  auto describe = [](const PathKey& k) {
    std::string s = "[";
    for (int l : k.first) s += std::to_string(l) + " ";
    s += ": ";
    for (int l : k.second) s += std::to_string(l) + " ";
    s += "]";
    return s;
  };
  for (const auto& [key, w] : a) {
    auto it = b.find(key);
    if (it == b.end()) {
      if (why) *why = "path " + describe(key) + " missing from second set";
      return false;
    }
    if (std::abs(w - it->second) > tol) {
      if (why)
        *why = "path " + describe(key) + " weight " + std::to_string(w) +
               " vs " + std::to_string(it->second);
      return false;
    }
  }
  for (const auto& [key, w] : b) {
    (void)w;
    if (a.find(key) == a.end()) {
      if (why) *why = "path " + describe(key) + " missing from first set";
      return false;
    }
  }
  return true;
}

// Exact multiset comparison for operations that keep every path
// distinct (composition, connection). Paths are matched greedily after
// sorting by labels then weight.
inline bool PathMultisetsEqual(std::vector<gasr::Path> a,
                               std::vector<gasr::Path> b, double tol,
                               std::string* why = nullptr) {
  if (a.size() != b.size()) {
    if (why)
      *why = "path counts differ: " + std::to_string(a.size()) + " vs " +
             std::to_string(b.size());
    return false;
  }
  auto less = [](const gasr::Path& x, const gasr::Path& y) {
    if (x.ilabels != y.ilabels) return x.ilabels < y.ilabels;
    if (x.olabels != y.olabels) return x.olabels < y.olabels;
    return x.weight < y.weight;
  };
  std::sort(a.begin(), a.end(), less);
  std::sort(b.begin(), b.end(), less);
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i].ilabels != b[i].ilabels || a[i].olabels != b[i].olabels ||
        std::abs(a[i].weight - b[i].weight) > tol) {
      if (why) *why = "paths differ at sorted index " + std::to_string(i);
      return false;
    }
  }
  return true;
}

}  // namespace gasr_tests

#endif  // GASR_TESTS_FST_RANDOM_HPP_
