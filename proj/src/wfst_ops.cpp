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

#include "gasr/wfst_ops.hpp"

#include <algorithm>
#include <cstring>
#include <map>
#include <queue>
#include <tuple>
#include <unordered_map>

#include "gasr/common.hpp"

namespace gasr {

namespace {

void EnumerateDfs(const Wfst& fst, int state, int input_len, int arc_count,
                  const EnumerateOptions& opts, std::vector<int>* ilabels,
                  std::vector<int>* olabels, double weight,
                  std::vector<Path>* out) {
  if (fst.Final(state) < kInfinityWeight) {
    if (static_cast<long>(out->size()) >= opts.max_paths)
      throw Error("EnumeratePaths: path budget exceeded");
    Path p;
    p.ilabels = *ilabels;
    p.olabels = *olabels;
    p.weight = weight + fst.Final(state);
    out->push_back(std::move(p));
  }
  for (const Arc& arc : fst.ArcsAt(state)) {
    int next_input = input_len + (arc.ilabel != kEpsilonLabel ? 1 : 0);
    if (next_input > opts.max_len) continue;
    if (arc_count + 1 > opts.max_arcs_per_path)
      throw Error("EnumeratePaths: expansion cap exceeded (cycle of "
                  "epsilon input labels?)");
    if (arc.ilabel != kEpsilonLabel) ilabels->push_back(arc.ilabel);
    if (arc.olabel != kEpsilonLabel) olabels->push_back(arc.olabel);
    EnumerateDfs(fst, arc.dest, next_input, arc_count + 1, opts, ilabels,
                 olabels, weight + arc.weight, out);
    if (arc.ilabel != kEpsilonLabel) ilabels->pop_back();
    if (arc.olabel != kEpsilonLabel) olabels->pop_back();
  }
}

}  // namespace

std::vector<Path> EnumeratePaths(const Wfst& fst,
                                 const EnumerateOptions& opts) {
  std::vector<Path> out;
  if (fst.NumStates() == 0) return out;
  if (fst.Start() < 0) throw Error("EnumeratePaths: no start state");
  std::vector<int> ilabels, olabels;
  EnumerateDfs(fst, fst.Start(), 0, 0, opts, &ilabels, &olabels, 0.0, &out);
  return out;
}

std::vector<Path> EnumeratePaths(const Wfst& fst, int max_len) {
  EnumerateOptions opts;
  opts.max_len = max_len;
  return EnumeratePaths(fst, opts);
}

Wfst ArcSort(const Wfst& fst, SortSide side) {
  Wfst out = fst;
  for (int s = 0; s < out.NumStates(); ++s) {
    auto& arcs = out.MutableArcsAt(s);
    if (side == SortSide::kInput) {
      std::stable_sort(arcs.begin(), arcs.end(),
                       [](const Arc& x, const Arc& y) {
                         return x.ilabel < y.ilabel;
                       });
    } else {
      std::stable_sort(arcs.begin(), arcs.end(),
                       [](const Arc& x, const Arc& y) {
                         return x.olabel < y.olabel;
                       });
    }
  }
  return out;
}

bool IsArcSorted(const Wfst& fst, SortSide side) {
  for (int s = 0; s < fst.NumStates(); ++s) {
    const auto& arcs = fst.ArcsAt(s);
    for (size_t i = 1; i < arcs.size(); ++i) {
      int prev = side == SortSide::kInput ? arcs[i - 1].ilabel
                                          : arcs[i - 1].olabel;
      int cur = side == SortSide::kInput ? arcs[i].ilabel : arcs[i].olabel;
      if (prev > cur) return false;
    }
  }
  return true;
}

namespace {

// Composite state for composition: (state in A, state in B, filter).
// Filter 0: neutral; 1: consuming A-side epsilons; 2: B-side epsilons.
struct ComposeKey {
  int a;
  int b;
  int f;
  bool operator==(const ComposeKey& o) const {
    return a == o.a && b == o.b && f == o.f;
  }
};

struct ComposeKeyHash {
  size_t operator()(const ComposeKey& k) const {
    size_t h = static_cast<size_t>(k.a) * 1000003u;
    h = (h + static_cast<size_t>(k.b)) * 1000003u;
    return h + static_cast<size_t>(k.f);
  }
};

// First arc in a sorted block with the given input label, arcs.size() if
// absent.
size_t LowerBoundIlabel(const std::vector<Arc>& arcs, int label) {
  size_t lo = 0, hi = arcs.size();
  while (lo < hi) {
    size_t mid = (lo + hi) / 2;
    if (arcs[mid].ilabel < label)
      lo = mid + 1;
    else
      hi = mid;
  }
  return lo;
}

}  // namespace

Wfst Compose(const Wfst& a, const Wfst& b) {
  if (a.OutputSymbols() != b.InputSymbols())
    throw Error("Compose: output symbols of A and input symbols of B are "
                "different tables");
  if (!IsArcSorted(b, SortSide::kInput))
    throw Error("Compose: B must be arc-sorted on input labels");
  Wfst out(a.InputSymbols(), b.OutputSymbols());
  if (a.NumStates() == 0 || b.NumStates() == 0) return out;
  if (a.Start() < 0 || b.Start() < 0)
    throw Error("Compose: missing start state");

  std::unordered_map<ComposeKey, int, ComposeKeyHash> ids;
  std::vector<ComposeKey> keys;
  std::queue<int> work;
  auto intern = [&](const ComposeKey& k) {
    auto it = ids.find(k);
    if (it != ids.end()) return it->second;
    int id = out.AddState();
    ids.emplace(k, id);
    keys.push_back(k);
    work.push(id);
    return id;
  };

  int start = intern({a.Start(), b.Start(), 0});
  out.SetStart(start);

  while (!work.empty()) {
    int id = work.front();
    work.pop();
    ComposeKey k = keys[id];
    double fa = a.Final(k.a), fb = b.Final(k.b);
    if (fa < kInfinityWeight && fb < kInfinityWeight)
      out.SetFinal(id, fa + fb);

    const auto& aarcs = a.ArcsAt(k.a);
    const auto& barcs = b.ArcsAt(k.b);

    for (size_t ai = 0; ai < aarcs.size(); ++ai) {
      const Arc& aa = aarcs[ai];
      if (aa.olabel == kEpsilonLabel) {
        // A moves alone; blocked once B-side epsilons have started.
        if (k.f != 2) {
          Arc na{aa.ilabel, kEpsilonLabel, aa.weight,
                 intern({aa.dest, k.b, 1})};
          out.AddArc(id, na);
        }
        // Paired epsilon move, only from the neutral filter state.
        if (k.f == 0) {
          for (size_t bi = LowerBoundIlabel(barcs, kEpsilonLabel);
               bi < barcs.size() && barcs[bi].ilabel == kEpsilonLabel; ++bi) {
            const Arc& ba = barcs[bi];
            Arc na{aa.ilabel, ba.olabel, aa.weight + ba.weight,
                   intern({aa.dest, ba.dest, 0})};
            out.AddArc(id, na);
          }
        }
      } else {
        for (size_t bi = LowerBoundIlabel(barcs, aa.olabel);
             bi < barcs.size() && barcs[bi].ilabel == aa.olabel; ++bi) {
          const Arc& ba = barcs[bi];
          Arc na{aa.ilabel, ba.olabel, aa.weight + ba.weight,
                 intern({aa.dest, ba.dest, 0})};
          out.AddArc(id, na);
        }
      }
    }
    // B moves alone; blocked once A-side epsilons have started.
    if (k.f != 1) {
      for (size_t bi = LowerBoundIlabel(barcs, kEpsilonLabel);
           bi < barcs.size() && barcs[bi].ilabel == kEpsilonLabel; ++bi) {
        const Arc& ba = barcs[bi];
        Arc na{kEpsilonLabel, ba.olabel, ba.weight,
               intern({k.a, ba.dest, 2})};
        out.AddArc(id, na);
      }
    }
  }
  return out;
}

namespace {

bool IsEpsEps(const Arc& a) {
  return a.ilabel == kEpsilonLabel && a.olabel == kEpsilonLabel;
}

// Min-weight closure over eps:eps arcs from a single source, by
// Bellman-Ford (weights may be negative as long as cycles are positive).
std::vector<double> EpsClosureFrom(const Wfst& fst, int src) {
  int n = fst.NumStates();
  std::vector<double> dist(n, kInfinityWeight);
  dist[src] = 0.0;
  for (int pass = 0; pass < n; ++pass) {
    bool changed = false;
    for (int s = 0; s < n; ++s) {
      if (dist[s] >= kInfinityWeight) continue;
      for (const Arc& a : fst.ArcsAt(s)) {
        if (!IsEpsEps(a)) continue;
        if (dist[s] + a.weight < dist[a.dest]) {
          dist[a.dest] = dist[s] + a.weight;
          changed = true;
        }
      }
    }
    if (!changed) break;
  }
  return dist;
}

void CheckEpsilonCycles(const Wfst& fst) {
  int n = fst.NumStates();
  for (int s = 0; s < n; ++s) {
    bool has_eps = false;
    for (const Arc& a : fst.ArcsAt(s))
      if (IsEpsEps(a)) { has_eps = true; break; }
    if (!has_eps) continue;
    std::vector<double> dist = EpsClosureFrom(fst, s);
    // Cheapest epsilon cycle through s.
    for (int t = 0; t < n; ++t) {
      if (dist[t] >= kInfinityWeight) continue;
      for (const Arc& a : fst.ArcsAt(t)) {
        if (!IsEpsEps(a) || a.dest != s) continue;
        if (dist[t] + a.weight <= 1e-12)
          throw Error("RemoveEpsilons: epsilon cycle with non-positive "
                      "weight at state " + std::to_string(s));
      }
    }
  }
}

}  // namespace

Wfst RemoveEpsilons(const Wfst& fst) {
  Wfst out(fst.InputSymbols(), fst.OutputSymbols());
  if (fst.NumStates() == 0) return out;
  CheckEpsilonCycles(fst);
  for (int s = 0; s < fst.NumStates(); ++s) out.AddState();
  out.SetStart(fst.Start());
  for (int s = 0; s < fst.NumStates(); ++s) {
    std::vector<double> dist = EpsClosureFrom(fst, s);
    double best_final = kInfinityWeight;
    for (int t = 0; t < fst.NumStates(); ++t) {
      if (dist[t] >= kInfinityWeight) continue;
      if (fst.Final(t) < kInfinityWeight)
        best_final = std::min(best_final, dist[t] + fst.Final(t));
      for (const Arc& a : fst.ArcsAt(t)) {
        if (IsEpsEps(a)) continue;
        // Reachable non-epsilon arc, pulled forward with closure weight.
        Arc na{a.ilabel, a.olabel, dist[t] + a.weight, a.dest};
        out.AddArc(s, na);
      }
    }
    if (best_final < kInfinityWeight) out.SetFinal(s, best_final);
  }
  return out;
}

namespace {

// Subset element for determinization: a residual weight and a residual
// output string still owed at this source state.
struct DetElem {
  int state;
  double weight;
  std::vector<int> ostring;
  bool operator<(const DetElem& o) const {
    if (state != o.state) return state < o.state;
    if (ostring != o.ostring) return ostring < o.ostring;
    return weight < o.weight;
  }
};

std::string DetKeyOf(const std::vector<DetElem>& subset) {
  std::string key;
  for (const DetElem& e : subset) {
    key += std::to_string(e.state);
    key += ':';
    for (int o : e.ostring) {
      key += std::to_string(o);
      key += ',';
    }
    key += ':';
    uint64_t bits;
    static_assert(sizeof(bits) == sizeof(e.weight));
    std::memcpy(&bits, &e.weight, sizeof(bits));
    key += HashHex(bits);
    key += ';';
  }
  return key;
}

}  // namespace

Wfst Determinize(const Wfst& fst, const DeterminizeOptions& opts) {
  Wfst out(fst.InputSymbols(), fst.OutputSymbols());
  if (fst.NumStates() == 0) return out;
  if (fst.Start() < 0) throw Error("Determinize: no start state");
  for (int s = 0; s < fst.NumStates(); ++s)
    for (const Arc& a : fst.ArcsAt(s))
      if (a.ilabel == kEpsilonLabel)
        throw Error("Determinize: input side has epsilon arcs; remove "
                    "epsilons first");

  std::unordered_map<std::string, int> ids;
  // Keyed by output state id: the epsilon chains below allocate states
  // of their own, so subset states are not contiguous.
  std::unordered_map<int, std::vector<DetElem>> subsets;
  std::queue<int> work;

  auto intern = [&](std::vector<DetElem> subset) {
    std::string key = DetKeyOf(subset);
    auto it = ids.find(key);
    if (it != ids.end()) return it->second;
    if (static_cast<int>(ids.size()) >= opts.max_states)
      throw Error("Determinize: state bound exceeded; input may not be "
                  "determinizable");
    int id = out.AddState();
    ids.emplace(std::move(key), id);
    subsets.emplace(id, std::move(subset));
    work.push(id);
    return id;
  };

  out.SetStart(intern({{fst.Start(), 0.0, {}}}));

  while (!work.empty()) {
    int id = work.front();
    work.pop();
    // Each id is expanded exactly once, so its subset can be taken.
    std::vector<DetElem> subset = std::move(subsets.at(id));

    // Finality: residual output strings of final elements must still be
    // emitted, each distinct string through its own epsilon-input chain.
    std::map<std::vector<int>, double> final_by_string;
    for (const DetElem& e : subset) {
      double f = fst.Final(e.state);
      if (f >= kInfinityWeight) continue;
      double w = e.weight + f;
      auto it = final_by_string.find(e.ostring);
      if (it == final_by_string.end())
        final_by_string.emplace(e.ostring, w);
      else
        it->second = std::min(it->second, w);
    }
    for (const auto& [ostring, w] : final_by_string) {
      if (ostring.empty()) {
        out.SetFinal(id, w);
        continue;
      }
      int cur = id;
      for (size_t i = 0; i < ostring.size(); ++i) {
        int next = out.AddState();
        Arc na{kEpsilonLabel, ostring[i], i == 0 ? w : 0.0, next};
        out.AddArc(cur, na);
        cur = next;
      }
      out.SetFinal(cur, 0.0);
    }

    // Transition labels present in the subset, ascending.
    std::map<int, std::vector<DetElem>> by_label;
    for (const DetElem& e : subset) {
      for (const Arc& a : fst.ArcsAt(e.state)) {
        std::vector<int> ostring = e.ostring;
        if (a.olabel != kEpsilonLabel) ostring.push_back(a.olabel);
        by_label[a.ilabel].push_back(
            {a.dest, e.weight + a.weight, std::move(ostring)});
      }
    }
    for (auto& [label, elems] : by_label) {
      // Merge elements that agree on (state, residual string).
      std::sort(elems.begin(), elems.end());
      std::vector<DetElem> merged;
      for (DetElem& e : elems) {
        if (!merged.empty() && merged.back().state == e.state &&
            merged.back().ostring == e.ostring)
          merged.back().weight = std::min(merged.back().weight, e.weight);
        else
          merged.push_back(std::move(e));
      }
      // Extract the common weight and the longest common output prefix.
      double wmin = kInfinityWeight;
      for (const DetElem& e : merged) wmin = std::min(wmin, e.weight);
      std::vector<int> prefix = merged.front().ostring;
      for (const DetElem& e : merged) {
        size_t n = 0;
        while (n < prefix.size() && n < e.ostring.size() &&
               prefix[n] == e.ostring[n])
          ++n;
        prefix.resize(n);
      }
      for (DetElem& e : merged) {
        e.weight -= wmin;
        e.ostring.erase(e.ostring.begin(), e.ostring.begin() + prefix.size());
      }
      int dest = intern(std::move(merged));
      // Factor a multi-symbol prefix into a chain.
      if (prefix.size() <= 1) {
        Arc na{label, prefix.empty() ? kEpsilonLabel : prefix[0], wmin, dest};
        out.AddArc(id, na);
      } else {
        std::vector<int> chain;
        for (size_t i = 0; i + 1 < prefix.size(); ++i)
          chain.push_back(out.AddState());
        for (size_t i = 0; i < prefix.size(); ++i) {
          int from = i == 0 ? id : chain[i - 1];
          int to = i + 1 == prefix.size() ? dest : chain[i];
          Arc na{i == 0 ? label : kEpsilonLabel, prefix[i],
                 i == 0 ? wmin : 0.0, to};
          out.AddArc(from, na);
        }
      }
    }
  }
  return out;
}

Wfst Connect(const Wfst& fst) {
  Wfst out(fst.InputSymbols(), fst.OutputSymbols());
  if (fst.NumStates() == 0 || fst.Start() < 0) return out;
  int n = fst.NumStates();

  std::vector<char> accessible(n, 0);
  {
    std::queue<int> q;
    q.push(fst.Start());
    accessible[fst.Start()] = 1;
    while (!q.empty()) {
      int s = q.front();
      q.pop();
      for (const Arc& a : fst.ArcsAt(s)) {
        if (!accessible[a.dest]) {
          accessible[a.dest] = 1;
          q.push(a.dest);
        }
      }
    }
  }
  std::vector<std::vector<int>> preds(n);
  for (int s = 0; s < n; ++s)
    for (const Arc& a : fst.ArcsAt(s)) preds[a.dest].push_back(s);
  std::vector<char> coaccessible(n, 0);
  {
    std::queue<int> q;
    for (int s = 0; s < n; ++s) {
      if (fst.Final(s) < kInfinityWeight) {
        coaccessible[s] = 1;
        q.push(s);
      }
    }
    while (!q.empty()) {
      int s = q.front();
      q.pop();
      for (int p : preds[s]) {
        if (!coaccessible[p]) {
          coaccessible[p] = 1;
          q.push(p);
        }
      }
    }
  }

  std::vector<int> remap(n, -1);
  for (int s = 0; s < n; ++s)
    if (accessible[s] && coaccessible[s]) remap[s] = out.AddState();
  if (remap[fst.Start()] < 0) return Wfst(fst.InputSymbols(),
                                          fst.OutputSymbols());
  out.SetStart(remap[fst.Start()]);
  for (int s = 0; s < n; ++s) {
    if (remap[s] < 0) continue;
    if (fst.Final(s) < kInfinityWeight) out.SetFinal(remap[s], fst.Final(s));
    for (const Arc& a : fst.ArcsAt(s)) {
      if (remap[a.dest] < 0) continue;
      Arc na{a.ilabel, a.olabel, a.weight, remap[a.dest]};
      out.AddArc(remap[s], na);
    }
  }
  return out;
}

double ShortestPathWeight(const Wfst& fst) {
  if (fst.NumStates() == 0 || fst.Start() < 0) return kInfinityWeight;
  int n = fst.NumStates();
  for (int s = 0; s < n; ++s)
    for (const Arc& a : fst.ArcsAt(s))
      if (a.weight < -1e-12)
        throw Error("ShortestPathWeight: negative arc weight");
  std::vector<double> dist(n, kInfinityWeight);
  dist[fst.Start()] = 0.0;
  typedef std::pair<double, int> Entry;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> pq;
  pq.push({0.0, fst.Start()});
  double best = kInfinityWeight;
  while (!pq.empty()) {
    auto [d, s] = pq.top();
    pq.pop();
    if (d > dist[s]) continue;
    if (fst.Final(s) < kInfinityWeight)
      best = std::min(best, d + fst.Final(s));
    for (const Arc& a : fst.ArcsAt(s)) {
      double nd = d + a.weight;
      if (nd < dist[a.dest]) {
        dist[a.dest] = nd;
        pq.push({nd, a.dest});
      }
    }
  }
  return best;
}

}  // namespace gasr
