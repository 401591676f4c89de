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

#ifndef GASR_WFST_OPS_HPP_
#define GASR_WFST_OPS_HPP_

#include <string>
#include <vector>

#include "gasr/wfst.hpp"

namespace gasr {

// One accepting path: labels with epsilons dropped, weight includes the
// final weight of the terminating state.
struct Path {
  std::vector<int> ilabels;
  std::vector<int> olabels;
  double weight = 0.0;
};

struct EnumerateOptions {
  // Upper bound on non-epsilon input labels per path.
  int max_len = 10;
  // Total arcs a single path may traverse before the expansion cap error.
  int max_arcs_per_path = 256;
  // Total accepting paths before an explosion error.
  long max_paths = 1000000;
};

// Exhaustive path listing in depth-first arc order. Throws gasr::Error
// with "expansion cap" in the message if a partial path exceeds
// max_arcs_per_path (e.g. an epsilon cycle), and with "path budget" if
// the accepting-path count exceeds max_paths.
std::vector<Path> EnumeratePaths(const Wfst& fst,
                                 const EnumerateOptions& opts = {});
std::vector<Path> EnumeratePaths(const Wfst& fst, int max_len);

enum class SortSide { kInput, kOutput };

// Stable per-state arc sort by the chosen label; idempotent.
Wfst ArcSort(const Wfst& fst, SortSide side);
bool IsArcSorted(const Wfst& fst, SortSide side);

// Composition with the three-state epsilon filter, so each compatible
// pair of paths in A and B yields exactly one composed path.
// Requires A.OutputSymbols() == B.InputSymbols() and B arc-sorted on
// input labels.
Wfst Compose(const Wfst& a, const Wfst& b);

// Removes arcs that are epsilon on both sides by weighted epsilon-closure.
// Epsilon cycles must have strictly positive weight.
Wfst RemoveEpsilons(const Wfst& fst);

struct DeterminizeOptions {
  int max_states = 1000000;
};

// Weighted subset determinization with residual weights and residual
// output strings. The input side must be epsilon-free (run
// RemoveEpsilons first); common output prefixes longer than one symbol
// factor into chains of epsilon-input arcs.
Wfst Determinize(const Wfst& fst, const DeterminizeOptions& opts = {});

// Keeps states both accessible and coaccessible; survivors are
// renumbered in ascending old-id order.
Wfst Connect(const Wfst& fst);

// Weight of the cheapest accepting path, or kInfinityWeight if none.
// Requires non-negative arc weights.
double ShortestPathWeight(const Wfst& fst);

}  // namespace gasr

#endif  // GASR_WFST_OPS_HPP_
