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
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "gasr/common.hpp"
#include "gasr/grapheme_set.hpp"
#include "gasr/rng.hpp"
#include "gasr/types.hpp"

using namespace gasr;

namespace {

VectorX Vec(std::initializer_list<double> values) {
  VectorX v(static_cast<int>(values.size()));
  int i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

GraphemeSet AsciiSet(const std::string& letters, const std::string& tag) {
  return BuildGraphemeSet({letters}, {ParseCodepointRange("U+0061-U+007A")},
                          DefaultExtraGraphemes(), tag)
      .set;
}

// Likelihood recomputed from first principles, independent of the
// library formula's code path.
double PooledLogLikelihood(const ContextStats& s, double floor = 1e-4) {
  if (s.count == 0) return 0.0;
  double n = static_cast<double>(s.count);
  double total = 0.0;
  for (int d = 0; d < s.sum.size(); ++d) {
    double mean = s.sum[d] / n;
    double var = s.sumsq[d] / n - mean * mean;
    if (var < floor) var = floor;
    total += 1.0 + std::log(2.0 * M_PI) + std::log(var);
  }
  return -0.5 * n * total;
}

}  // namespace

TEST_CASE("tree: stats accumulate one frame at a time") {
  StatsTable table;
  MatrixX features(2, 2);
  features.col(0) = Vec({1.0, 2.0});
  features.col(1) = Vec({3.0, 4.0});
  StatsKey key{"a", "b", "c", 0};
  AccumulateStats({key, key}, features, &table);
  REQUIRE(table.count(key) == 1);
  const auto& s = table.at(key);
  CHECK(s.count == 2);
  CHECK(s.sum[0] == 4.0);
  CHECK(s.sum[1] == 6.0);
  CHECK(s.sumsq[0] == 10.0);
  CHECK(s.sumsq[1] == 20.0);
}

TEST_CASE("tree: merge doubles and order never matters") {
  StatsTable a;
  MatrixX f(1, 3);
  f(0, 0) = 1.0;
  f(0, 1) = 5.0;
  f(0, 2) = -2.0;
  StatsKey k1{"<p>", "a", "b", 0}, k2{"a", "b", "<p>", 0};
  AccumulateStats({k1, k2, k1}, f, &a);

  StatsTable doubled = a;
  MergeStats(a, &doubled);
  CHECK(doubled.at(k1).count == 2 * a.at(k1).count);
  CHECK(doubled.at(k1).sum[0] == 2 * a.at(k1).sum[0]);
  CHECK(doubled.at(k2).sumsq[0] == 2 * a.at(k2).sumsq[0]);

  // Shuffled accumulation gives the identical table.
  StatsTable b;
  AccumulateStats({k1, k1, k2},
                  [&] {
                    MatrixX g(1, 3);
                    g(0, 0) = 1.0;
                    g(0, 1) = -2.0;
                    g(0, 2) = 5.0;
                    return g;
                  }(),
                  &b);
  CHECK(StatsToText(a) == StatsToText(b));
}

TEST_CASE("tree: accumulate validates shapes") {
  StatsTable table;
  MatrixX f(2, 2);
  f.setZero();
  CHECK_THROWS_AS(AccumulateStats({StatsKey{"a", "b", "c", 0}}, f, &table),
                  Error);  // one key, two frames
  MatrixX g(3, 1);
  g.setZero();
  AccumulateStats({StatsKey{"a", "b", "c", 0}}, g, &table);
  MatrixX h(2, 1);
  h.setZero();
  CHECK_THROWS_AS(AccumulateStats({StatsKey{"x", "y", "z", 0}}, h, &table),
                  Error);  // dimension change mid-table
}

TEST_CASE("tree: stats text round trip") {
  StatsTable table;
  MatrixX f(2, 2);
  f.col(0) = Vec({0.5, -1.5});
  f.col(1) = Vec({2.5, 0.25});
  AccumulateStats({StatsKey{"<p>", "a", "b", 0}, StatsKey{"a", "b", "<p>", 1}},
                  f, &table);
  std::string text = StatsToText(table);
  StatsTable back = StatsFromText(text);
  CHECK(StatsToText(back) == text);
  REQUIRE(back.size() == 2);
  CHECK(back.begin()->second.count == 1);

  CHECK_THROWS_AS(StatsFromText("junk line\n"), Error);
  // Duplicate keys are a corruption signal, not something to merge.
  std::string dup = text + text;
  CHECK_THROWS_AS(StatsFromText(dup), Error);
}

TEST_CASE("tree: gaussian log likelihood") {
  ContextStats s;
  s.count = 4;
  s.sum = Vec({8.0});
  s.sumsq = Vec({20.0});  // mean 2, var 1
  CHECK(GaussianLogLikelihood(s) ==
        doctest::Approx(-0.5 * 4.0 * (1.0 + std::log(2.0 * M_PI))));

  // Degenerate stats hit the variance floor instead of exploding.
  ContextStats flat;
  flat.count = 3;
  flat.sum = Vec({6.0});
  flat.sumsq = Vec({12.0});  // var 0
  CHECK(GaussianLogLikelihood(flat) ==
        doctest::Approx(-0.5 * 3.0 *
                        (1.0 + std::log(2.0 * M_PI) + std::log(1e-4))));
  CHECK(GaussianLogLikelihood(ContextStats{}) == 0.0);

  ContextStats r;
  r.count = 7;
  r.sum = Vec({3.0, -1.0});
  r.sumsq = Vec({9.0, 4.0});
  CHECK(GaussianLogLikelihood(r) == doctest::Approx(PooledLogLikelihood(r)));
}

TEST_CASE("tree: question inventory") {
  auto qs = GenerateQuestions({AsciiSet("abcd", "L1"), AsciiSet("wxyz", "L2")});
  // Per language one full-set question plus range halves; one singleton
  // per union grapheme.
  bool has_l1_all = false, has_l2_all = false;
  int singletons = 0;
  for (const auto& q : qs) {
    if (q.name == "lang:L1") {
      has_l1_all = true;
      CHECK(q.members.count("a") == 1);
      CHECK(q.members.count("w") == 0);
    }
    if (q.name == "lang:L2") has_l2_all = true;
    if (q.members.size() == 1) ++singletons;
  }
  CHECK(has_l1_all);
  CHECK(has_l2_all);
  // Union inventory: 8 letters + 3 extras.
  CHECK(singletons == 11);
  // Names are unique.
  std::set<std::string> names;
  for (const auto& q : qs) CHECK(names.insert(q.name).second);
}

TEST_CASE("tree: identical stats never split") {
  auto gset = AsciiSet("ab", "L");
  auto qs = GenerateQuestions({gset});
  StatsTable table;
  MatrixX f(2, 4);
  for (int c = 0; c < 4; ++c) f.col(c) = Vec({1.0, -1.0});
  AccumulateStats({StatsKey{"<p>", "a", "b", 0}, StatsKey{"b", "a", "b", 0},
                   StatsKey{"a", "a", "a", 0}, StatsKey{"b", "a", "a", 0}},
                  f, &table);
  // Every candidate gain is exactly zero, so any positive threshold
  // keeps the roots.
  auto tree = GrowTree(table, qs, 16, 1e-6);
  // One root, no internal nodes: every context collapses to one leaf.
  CHECK(tree.leaf_count == 1);
  CHECK(tree.MapTrigrapheme("<p>", "a", "b", 0) ==
        tree.MapTrigrapheme("a", "a", "a", 0));
}

TEST_CASE("tree: separated means split with positive gain") {
  auto gset = AsciiSet("ab", "L");
  auto qs = GenerateQuestions({gset});
  StatsTable table;
  // Left context "a" pulls the feature to 0, left context "b" to 10;
  // plenty of frames so the split gain dominates the floor.
  MatrixX low(1, 20), high(1, 20);
  for (int c = 0; c < 20; ++c) {
    low(0, c) = (c % 2 == 0) ? -1.0 : 1.0;
    high(0, c) = 10.0 + ((c % 2 == 0) ? -1.0 : 1.0);
  }
  std::vector<StatsKey> low_keys(20, StatsKey{"a", "a", "b", 0});
  std::vector<StatsKey> high_keys(20, StatsKey{"b", "a", "b", 0});
  AccumulateStats(low_keys, low, &table);
  AccumulateStats(high_keys, high, &table);

  auto tree = GrowTree(table, qs, 16, 0.0);
  CHECK(tree.leaf_count == 2);
  int id_low = tree.MapTrigrapheme("a", "a", "b", 0);
  int id_high = tree.MapTrigrapheme("b", "a", "b", 0);
  CHECK(id_low != id_high);

  // The split's gain, recomputed from first principles.
  ContextStats pooled = table.at(StatsKey{"a", "a", "b", 0});
  pooled.Merge(table.at(StatsKey{"b", "a", "b", 0}));
  double gain = PooledLogLikelihood(table.at(StatsKey{"a", "a", "b", 0})) +
                PooledLogLikelihood(table.at(StatsKey{"b", "a", "b", 0})) -
                PooledLogLikelihood(pooled);
  CHECK(gain > 0.0);
}

TEST_CASE("tree: min gain and max leaves bound growth") {
  Rng rng(5);
  auto gset = AsciiSet("abcd", "L");
  auto qs = GenerateQuestions({gset});
  StatsTable table;
  std::vector<std::string> letters = {"a", "b", "c", "d", "<p>"};
  for (const auto& l : letters) {
    for (const auto& r : letters) {
      MatrixX f(2, 6);
      for (int c = 0; c < 6; ++c)
        f.col(c) = Vec({rng.Uniform(-3, 3), rng.Uniform(-3, 3)});
      std::vector<StatsKey> keys(6, StatsKey{l, "a", r, 0});
      AccumulateStats(keys, f, &table);
    }
  }

  auto unl = GrowTree(table, qs, 1000, 0.0);
  auto capped = GrowTree(table, qs, 4, 0.0);
  CHECK(capped.leaf_count <= 4);
  CHECK(unl.leaf_count >= capped.leaf_count);

  // A high gain threshold stops growth entirely.
  auto strict = GrowTree(table, qs, 1000, 1e9);
  CHECK(strict.leaf_count == 1);

  CHECK_THROWS_AS(GrowTree(table, qs, 0, 0.0), Error);
  CHECK_THROWS_AS(GrowTree(StatsTable{}, qs, 8, 0.0), Error);
}

TEST_CASE("tree: roots split by center and position") {
  auto gset = AsciiSet("ab", "L");
  auto qs = GenerateQuestions({gset});
  StatsTable table;
  MatrixX f(1, 4);
  for (int c = 0; c < 4; ++c) f(0, c) = static_cast<double>(c);
  AccumulateStats({StatsKey{"a", "a", "b", 0}, StatsKey{"a", "a", "b", 1},
                   StatsKey{"a", "b", "b", 0}, StatsKey{"<p>", "b", "a", 0}},
                  f, &table);
  auto tree = GrowTree(table, qs, 32, 1e9);  // no splits, roots only
  // Three distinct (center, pos) pairs, three leaves.
  CHECK(tree.leaf_count == 3);
  CHECK(tree.MapTrigrapheme("a", "a", "x", 0) ==
        tree.MapTrigrapheme("zz", "a", "q", 0));
  CHECK(tree.MapTrigrapheme("a", "a", "b", 0) !=
        tree.MapTrigrapheme("a", "a", "b", 1));
  CHECK(tree.MapTrigrapheme("a", "a", "b", 0) !=
        tree.MapTrigrapheme("a", "b", "b", 0));
}

TEST_CASE("tree: mapping is total for known centers only") {
  auto gset = AsciiSet("ab", "L");
  auto qs = GenerateQuestions({gset});
  StatsTable table;
  MatrixX f(1, 2);
  f(0, 0) = 0.0;
  f(0, 1) = 1.0;
  AccumulateStats({StatsKey{"a", "a", "b", 0}, StatsKey{"b", "a", "a", 0}}, f,
                  &table);
  auto tree = GrowTree(table, qs, 8, 0.0);
  // Unseen contexts route through "no" branches; unseen centers are a
  // hard error because they have no root.
  CHECK_NOTHROW(tree.MapTrigrapheme("<sil>", "a", "<p>", 0));
  CHECK_THROWS_WITH_AS(tree.MapTrigrapheme("a", "zz", "b", 0),
                       doctest::Contains("zz"), Error);
  CHECK_THROWS_AS(tree.MapTrigrapheme("a", "a", "b", 7), Error);
}

TEST_CASE("tree: leaf ids are dense and exhaustive") {
  Rng rng(17);
  auto gset = AsciiSet("abc", "L");
  auto qs = GenerateQuestions({gset});
  StatsTable table;
  std::vector<std::string> ctx = {"a", "b", "c", "<p>", "<sil>"};
  std::vector<std::string> centers = {"a", "b", "c", "<sil>"};
  for (const auto& l : ctx)
    for (const auto& c : centers)
      for (const auto& r : ctx) {
        MatrixX f(1, 3);
        for (int i = 0; i < 3; ++i) f(0, i) = rng.Uniform(-2, 2);
        AccumulateStats(
            std::vector<StatsKey>(3, StatsKey{l, c, r, 0}), f, &table);
      }
  auto tree = GrowTree(table, qs, 24, 0.0);
  std::set<int> ids;
  for (const auto& l : ctx)
    for (const auto& c : centers)
      for (const auto& r : ctx) ids.insert(tree.MapTrigrapheme(l, c, r, 0));
  CHECK(static_cast<int>(ids.size()) == tree.leaf_count);
  CHECK(*ids.begin() == 0);
  CHECK(*ids.rbegin() == tree.leaf_count - 1);
}

TEST_CASE("tree: growth is insertion order independent") {
  Rng rng(23);
  auto gset = AsciiSet("abcd", "L");
  auto qs = GenerateQuestions({gset});
  std::vector<std::pair<StatsKey, VectorX>> frames;
  std::vector<std::string> ctx = {"a", "b", "c", "d", "<p>"};
  for (const auto& l : ctx)
    for (const auto& r : ctx)
      for (int i = 0; i < 4; ++i)
        frames.push_back(
            {StatsKey{l, "a", r, 0}, Vec({rng.Uniform(-2, 2)})});

  StatsTable fwd;
  for (const auto& [k, v] : frames) {
    MatrixX f(1, 1);
    f.col(0) = v;
    AccumulateStats({k}, f, &fwd);
  }
  StatsTable rev;
  for (auto it = frames.rbegin(); it != frames.rend(); ++it) {
    MatrixX f(1, 1);
    f.col(0) = it->second;
    AccumulateStats({it->first}, f, &rev);
  }
  CHECK(TreeToText(GrowTree(fwd, qs, 16, 0.0)) ==
        TreeToText(GrowTree(rev, qs, 16, 0.0)));
}

TEST_CASE("tree: text round trip preserves the mapping") {
  Rng rng(29);
  auto gset = AsciiSet("ab", "L");
  auto qs = GenerateQuestions({gset});
  StatsTable table;
  std::vector<std::string> ctx = {"a", "b", "<p>"};
  for (const auto& l : ctx)
    for (const auto& r : ctx) {
      MatrixX f(2, 4);
      for (int c = 0; c < 4; ++c)
        f.col(c) = Vec({rng.Uniform(-2, 2), rng.Uniform(-2, 2)});
      AccumulateStats(std::vector<StatsKey>(4, StatsKey{l, "a", r, 0}), f,
                      &table);
    }
  auto tree = GrowTree(table, qs, 8, 0.0);
  auto back = TreeFromText(TreeToText(tree));
  CHECK(back.leaf_count == tree.leaf_count);
  for (const auto& l : ctx)
    for (const auto& r : ctx)
      CHECK(back.MapTrigrapheme(l, "a", r, 0) ==
            tree.MapTrigrapheme(l, "a", r, 0));
  CHECK(TreeToText(back) == TreeToText(tree));

  CHECK_THROWS_AS(TreeFromText("(not a tree"), Error);
}

TEST_CASE("tree: trigrapheme expansion pads with the boundary") {
  auto tris = ExpandTrigraphemes({"a", "b"});
  REQUIRE(tris.size() == 2);
  CHECK(tris[0].left == kBoundaryToken);
  CHECK(tris[0].center == "a");
  CHECK(tris[0].right == "b");
  CHECK(tris[1].left == "a");
  CHECK(tris[1].center == "b");
  CHECK(tris[1].right == kBoundaryToken);

  auto single = ExpandTrigraphemes({"a"});
  REQUIRE(single.size() == 1);
  CHECK(single[0].left == kBoundaryToken);
  CHECK(single[0].right == kBoundaryToken);

  CHECK(ExpandTrigraphemes({}).empty());
}

TEST_CASE("tree: uniform alignment spreads frames in order") {
  auto keys = AlignUniform({"a", "b"}, 1, 6);
  REQUIRE(keys.size() == 6);
  for (int t = 0; t < 3; ++t) CHECK(keys[t].center == "a");
  for (int t = 3; t < 6; ++t) CHECK(keys[t].center == "b");
  CHECK(keys[0].left == kBoundaryToken);
  CHECK(keys[0].right == "b");

  // Topology 2 walks each unit's positions in order.
  auto two = AlignUniform({"a"}, 2, 4);
  REQUIRE(two.size() == 4);
  CHECK(two[0].pos == 0);
  CHECK(two[1].pos == 0);
  CHECK(two[2].pos == 1);
  CHECK(two[3].pos == 1);

  // Fewer frames than slots cannot cover every position.
  CHECK_THROWS_AS(AlignUniform({"a", "b"}, 2, 3), Error);
  CHECK_THROWS_AS(AlignUniform({}, 1, 5), Error);
}
