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

#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "fst_random.hpp"
#include "gasr/common.hpp"
#include "gasr/rng.hpp"
#include "gasr/wfst.hpp"

using namespace gasr;
using namespace gasr_tests;

namespace {

SymbolTable Letters(const std::string& all) {
  SymbolTable syms;
  for (char c : all) syms.AddSymbol(std::string(1, c));
  return syms;
}

}  // namespace

TEST_CASE("wfst ops: compose adds weights along matched labels") {
  SymbolTable sa = Letters("a"), sx = Letters("x"), sy = Letters("y");
  Wfst a(sa, sx);
  int a0 = a.AddState(), a1 = a.AddState();
  a.SetStart(a0);
  a.AddArc(a0, {1, 1, 1.0, a1});
  a.SetFinal(a1, 0.0);

  Wfst b(sx, sy);
  int b0 = b.AddState(), b1 = b.AddState();
  b.SetStart(b0);
  b.AddArc(b0, {1, 1, 2.0, b1});
  b.SetFinal(b1, 0.0);

  Wfst c = Compose(a, ArcSort(b, SortSide::kInput));
  auto paths = EnumeratePaths(c, 5);
  REQUIRE(paths.size() == 1);
  CHECK(paths[0].ilabels == std::vector<int>{1});   // a
  CHECK(paths[0].olabels == std::vector<int>{1});   // y
  CHECK(paths[0].weight == doctest::Approx(3.0));
  CHECK(c.InputSymbols() == sa);
  CHECK(c.OutputSymbols() == sy);
}

TEST_CASE("wfst ops: compose with the identity keeps the path set") {
  SymbolTable syms = Letters("ab");
  Rng rng(31);
  RandomFstOptions opts;
  opts.num_ilabels = 2;
  opts.num_olabels = 2;
  opts.allow_eps = false;
  Wfst m = MakeRandomFst(&rng, opts, syms, syms);

  // One-state identity over the shared alphabet.
  Wfst id(syms, syms);
  int s = id.AddState();
  id.SetStart(s);
  id.SetFinal(s, 0.0);
  for (int l = 1; l < syms.NumSymbols(); ++l) id.AddArc(s, {l, l, 0.0, s});

  Wfst composed = Compose(m, ArcSort(id, SortSide::kInput));
  std::string why;
  CHECK_MESSAGE(PathMultisetsEqual(EnumeratePaths(m, 6),
                                   EnumeratePaths(composed, 6), 1e-12, &why),
                why);
}

TEST_CASE("wfst ops: compose epsilon filter emits each pair once") {
  // A has an output epsilon; B has an input epsilon at the matching
  // state. Without the filter this pair would produce duplicate paths.
  SymbolTable sa = Letters("a"), sx = Letters("xy"), sz = Letters("z");
  Wfst a(sa, sx);
  int a0 = a.AddState(), a1 = a.AddState(), a2 = a.AddState();
  a.SetStart(a0);
  a.AddArc(a0, {1, 1, 0.5, a1});
  a.AddArc(a1, {0, 0, 0.25, a2});  // output epsilon
  a.SetFinal(a2, 0.0);

  Wfst b(sx, sz);
  int b0 = b.AddState(), b1 = b.AddState(), b2 = b.AddState();
  b.SetStart(b0);
  b.AddArc(b0, {0, 0, 0.125, b1});  // input epsilon
  b.AddArc(b1, {1, 1, 1.0, b2});
  b.SetFinal(b2, 0.0);

  Wfst c = Compose(a, ArcSort(b, SortSide::kInput));
  auto paths = EnumeratePaths(c, 5);
  REQUIRE(paths.size() == 1);
  CHECK(paths[0].ilabels == std::vector<int>{1});
  CHECK(paths[0].olabels == std::vector<int>{1});
  CHECK(paths[0].weight == doctest::Approx(1.875));
}

TEST_CASE("wfst ops: compose rejects mismatched symbols") {
  SymbolTable sa = Letters("a"), sb = Letters("b");
  Wfst a(sa, sa), b(sb, sb);
  a.SetStart(a.AddState());
  b.SetStart(b.AddState());
  CHECK_THROWS_AS(Compose(a, b), Error);
}

TEST_CASE("wfst ops: remove epsilons folds closure weights") {
  SymbolTable syms = Letters("ab");
  Wfst fst(syms, syms);
  int s0 = fst.AddState(), s1 = fst.AddState(), s2 = fst.AddState();
  fst.SetStart(s0);
  fst.AddArc(s0, {0, 0, 1.0, s1});
  fst.AddArc(s1, {1, 2, 2.0, s2});
  fst.SetFinal(s2, 0.0);

  Wfst out = RemoveEpsilons(fst);
  for (int s = 0; s < out.NumStates(); ++s)
    for (const Arc& arc : out.ArcsAt(s))
      CHECK(!(arc.ilabel == kEpsilonLabel && arc.olabel == kEpsilonLabel));
  auto paths = EnumeratePaths(out, 5);
  REQUIRE(paths.size() == 1);
  CHECK(paths[0].ilabels == std::vector<int>{1});
  CHECK(paths[0].olabels == std::vector<int>{2});
  CHECK(paths[0].weight == doctest::Approx(3.0));
}

TEST_CASE("wfst ops: remove epsilons keeps epsilon-final paths") {
  // Epsilon closure reaching a final state folds into the final weight.
  SymbolTable syms = Letters("a");
  Wfst fst(syms, syms);
  int s0 = fst.AddState(), s1 = fst.AddState(), s2 = fst.AddState();
  fst.SetStart(s0);
  fst.AddArc(s0, {1, 1, 0.5, s1});
  fst.AddArc(s1, {0, 0, 0.25, s2});
  fst.SetFinal(s2, 0.125);
  Wfst out = RemoveEpsilons(fst);
  auto paths = EnumeratePaths(out, 5);
  REQUIRE(paths.size() == 1);
  CHECK(paths[0].weight == doctest::Approx(0.875));
}

TEST_CASE("wfst ops: zero weight epsilon cycle raises") {
  SymbolTable syms = Letters("a");
  Wfst fst(syms, syms);
  int s0 = fst.AddState(), s1 = fst.AddState();
  fst.SetStart(s0);
  fst.AddArc(s0, {0, 0, 0.0, s1});
  fst.AddArc(s1, {0, 0, 0.0, s0});
  fst.SetFinal(s1, 0.0);
  CHECK_THROWS_AS(RemoveEpsilons(fst), Error);
}

TEST_CASE("wfst ops: determinize merges duplicate labels with residuals") {
  // Two arcs on the same label; the subset keeps the weight difference
  // as a residual.
  SymbolTable syms = Letters("ab");
  Wfst fst(syms, syms);
  int s0 = fst.AddState(), s1 = fst.AddState(), s2 = fst.AddState();
  int s3 = fst.AddState();
  fst.SetStart(s0);
  fst.AddArc(s0, {1, 1, 1.0, s1});
  fst.AddArc(s0, {1, 1, 3.0, s2});
  fst.AddArc(s1, {2, 2, 0.0, s3});
  fst.SetFinal(s2, 0.5);
  fst.SetFinal(s3, 0.0);

  Wfst det = Determinize(fst);
  // Deterministic: one arc per input label per state.
  for (int s = 0; s < det.NumStates(); ++s) {
    std::set<int> seen;
    for (const Arc& arc : det.ArcsAt(s)) {
      if (arc.ilabel == kEpsilonLabel) continue;
      CHECK(seen.insert(arc.ilabel).second);
    }
  }
  // The merged arc carries the minimum weight.
  REQUIRE(det.ArcsAt(det.Start()).size() == 1);
  CHECK(det.ArcsAt(det.Start())[0].weight == doctest::Approx(1.0));

  std::string why;
  CHECK_MESSAGE(MinPathMapsEqual(MinWeightPaths(EnumeratePaths(fst, 6)),
                                 MinWeightPaths(EnumeratePaths(det, 6)),
                                 1e-9, &why),
                why);
}

TEST_CASE("wfst ops: determinize factors common output prefixes") {
  // Same input string, two output strings: the result stays input
  // deterministic by emitting residual outputs on epsilon-input arcs.
  SymbolTable syms = Letters("a"), osyms = Letters("xyz");
  Wfst fst(syms, osyms);
  int s0 = fst.AddState(), s1 = fst.AddState(), s2 = fst.AddState();
  fst.SetStart(s0);
  fst.AddArc(s0, {1, 1, 0.0, s1});  // a:x
  fst.AddArc(s0, {1, 2, 1.0, s2});  // a:y
  fst.SetFinal(s1, 0.0);
  fst.SetFinal(s2, 0.0);

  Wfst det = Determinize(fst);
  std::string why;
  CHECK_MESSAGE(MinPathMapsEqual(MinWeightPaths(EnumeratePaths(fst, 6)),
                                 MinWeightPaths(EnumeratePaths(det, 6)),
                                 1e-9, &why),
                why);
}

TEST_CASE("wfst ops: determinize requires an epsilon free input side") {
  SymbolTable syms = Letters("a");
  Wfst fst(syms, syms);
  int s0 = fst.AddState(), s1 = fst.AddState();
  fst.SetStart(s0);
  fst.AddArc(s0, {0, 1, 0.5, s1});
  fst.SetFinal(s1, 0.0);
  CHECK_THROWS_AS(Determinize(fst), Error);
}

TEST_CASE("wfst ops: determinize state budget raises") {
  SymbolTable syms = Letters("ab");
  Wfst fst(syms, syms);
  const int kSteps = 8;
  std::vector<int> layer;
  int start = fst.AddState();
  fst.SetStart(start);
  // Nondeterministic ladder whose subsets multiply.
  int prev_a = fst.AddState(), prev_b = fst.AddState();
  fst.AddArc(start, {1, 1, 0.0, prev_a});
  fst.AddArc(start, {1, 1, 1.0, prev_b});
  for (int i = 0; i < kSteps; ++i) {
    int na = fst.AddState(), nb = fst.AddState();
    fst.AddArc(prev_a, {1, 1, 0.0, na});
    fst.AddArc(prev_a, {1, 1, 1.0, nb});
    fst.AddArc(prev_b, {1, 1, 2.0, na});
    fst.AddArc(prev_b, {1, 1, 3.0, nb});
    prev_a = na;
    prev_b = nb;
  }
  fst.SetFinal(prev_a, 0.0);
  DeterminizeOptions opts;
  opts.max_states = 3;
  CHECK_THROWS_AS(Determinize(fst, opts), Error);
}

TEST_CASE("wfst ops: connect drops dead states and keeps paths") {
  SymbolTable syms = Letters("ab");
  Wfst fst(syms, syms);
  int s0 = fst.AddState(), s1 = fst.AddState();
  int dead_in = fst.AddState();   // unreachable
  int dead_out = fst.AddState();  // cannot reach a final
  fst.SetStart(s0);
  fst.AddArc(s0, {1, 1, 0.5, s1});
  fst.AddArc(s0, {2, 2, 0.5, dead_out});
  fst.AddArc(dead_in, {1, 1, 0.0, s1});
  fst.SetFinal(s1, 0.0);

  Wfst out = Connect(fst);
  CHECK(out.NumStates() == 2);
  std::string why;
  CHECK_MESSAGE(PathMultisetsEqual(EnumeratePaths(fst, 6),
                                   EnumeratePaths(out, 6), 1e-12, &why),
                why);
}

TEST_CASE("wfst ops: random machines agree with enumeration") {
  SymbolTable isyms = MakeLetterSymbols("i", 3);
  SymbolTable osyms = MakeLetterSymbols("o", 3);
  Rng rng(2026);
  int composed_checked = 0;
  for (int trial = 0; trial < 60; ++trial) {
    // Enumeration is the oracle, so the machines must enumerate
    // completely; an epsilon cycle would make the path set infinite.
    RandomFstOptions general;
    general.acyclic = true;
    Wfst m = MakeRandomFst(&rng, general, isyms, osyms);

    std::string why;
    {
      Wfst connected = Connect(m);
      CHECK_MESSAGE(PathMultisetsEqual(EnumeratePaths(m, 5),
                                       EnumeratePaths(connected, 5), 1e-12,
                                       &why),
                    why);
    }
    {
      Wfst rmeps = RemoveEpsilons(m);
      CHECK_MESSAGE(MinPathMapsEqual(MinWeightPaths(EnumeratePaths(m, 5)),
                                     MinWeightPaths(EnumeratePaths(rmeps, 5)),
                                     1e-9, &why),
                    why);
    }
    {
      RandomFstOptions det_opts;
      det_opts.acyclic = true;
      det_opts.eps_free_input = true;
      Wfst d = MakeRandomFst(&rng, det_opts, isyms, osyms);
      Wfst det = Determinize(d);
      CHECK_MESSAGE(MinPathMapsEqual(MinWeightPaths(EnumeratePaths(d, 8)),
                                     MinWeightPaths(EnumeratePaths(det, 8)),
                                     1e-9, &why),
                    why);
    }
    {
      // Compose a pair through a shared middle alphabet. Acyclic
      // machines enumerate completely, so every compatible path pair
      // is the exact oracle: each pair must appear exactly once.
      RandomFstOptions side;
      side.acyclic = true;
      Wfst a = MakeRandomFst(&rng, side, isyms, osyms);
      Wfst b = MakeRandomFst(&rng, side, osyms, isyms);
      Wfst c = Compose(a, ArcSort(b, SortSide::kInput));

      std::vector<Path> expected;
      for (const auto& pa : EnumeratePaths(a, 12)) {
        for (const auto& pb : EnumeratePaths(b, 12)) {
          if (pa.olabels != pb.ilabels) continue;
          expected.push_back({pa.ilabels, pb.olabels,
                              pa.weight + pb.weight});
        }
      }
      CHECK_MESSAGE(PathMultisetsEqual(expected, EnumeratePaths(c, 12),
                                       1e-9, &why),
                    why);
      composed_checked += static_cast<int>(expected.size());
    }
  }
  CHECK(composed_checked > 0);
}
