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

#ifndef GASR_GRAPHEME_SET_HPP_
#define GASR_GRAPHEME_SET_HPP_

#include <string>
#include <vector>

namespace gasr {

// Closed codepoint interval, e.g. U+0900..U+097F.
struct CodepointRange {
  char32_t lo = 0;
  char32_t hi = 0;
  bool Contains(char32_t cp) const { return cp >= lo && cp <= hi; }
  bool operator==(const CodepointRange& o) const {
    return lo == o.lo && hi == o.hi;
  }
};

// "U+0900-U+097F" or a single codepoint "U+0964".
CodepointRange ParseCodepointRange(const std::string& s);

// Always-permitted joining characters: apostrophe, hyphen, zero width
// joiner.
const std::vector<char32_t>& DefaultExtraGraphemes();

// A grapheme is a single Unicode codepoint. The inventory is kept
// sorted ascending and duplicate-free.
struct GraphemeSet {
  std::vector<std::string> language_ids;
  std::vector<char32_t> graphemes;
  std::vector<CodepointRange> source_ranges;
  std::vector<char32_t> extras;

  bool Contains(char32_t cp) const;
  int Size() const { return static_cast<int>(graphemes.size()); }

  // "U+XXXX<TAB>char" lines in codepoint order, with language ids,
  // ranges and extras in leading comment lines.
  std::string ToText() const;
  static GraphemeSet FromText(const std::string& text);
  void Save(const std::string& path) const;
  static GraphemeSet Load(const std::string& path);
};

struct RejectedWord {
  std::string word;
  std::vector<char32_t> uncovered;
};

struct GraphemeSetResult {
  GraphemeSet set;
  std::vector<RejectedWord> rejected;
};

// Collects every codepoint of `words` that falls inside `ranges`, plus
// all `extras`. Words containing codepoints outside ranges and extras
// land in the rejection list rather than being dropped silently.
// Ranges must be non-empty and non-overlapping.
GraphemeSetResult BuildGraphemeSet(const std::vector<std::string>& words,
                                   const std::vector<CodepointRange>& ranges,
                                   const std::vector<char32_t>& extras,
                                   const std::string& language_id);

// Union of inventories, ranges and extras; language ids concatenate in
// first-seen order.
GraphemeSet UnionGraphemeSets(const std::vector<GraphemeSet>& sets);

}  // namespace gasr

#endif  // GASR_GRAPHEME_SET_HPP_
