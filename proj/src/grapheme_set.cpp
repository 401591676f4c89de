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

#include "gasr/grapheme_set.hpp"

#include <algorithm>
#include <set>

#include "gasr/common.hpp"
#include "gasr/utf8.hpp"

namespace gasr {

CodepointRange ParseCodepointRange(const std::string& s) {
  size_t dash = s.find('-', 2);  // skip "U+"
  CodepointRange r;
  if (dash == std::string::npos) {
    r.lo = r.hi = ParseCodepointNotation(s);
  } else {
    r.lo = ParseCodepointNotation(s.substr(0, dash));
    r.hi = ParseCodepointNotation(s.substr(dash + 1));
  }
  if (r.lo > r.hi) throw Error("empty codepoint range: " + s);
  return r;
}

const std::vector<char32_t>& DefaultExtraGraphemes() {
  static const std::vector<char32_t> kExtras = {0x0027, 0x002D, 0x200D};
  return kExtras;
}

bool GraphemeSet::Contains(char32_t cp) const {
  return std::binary_search(graphemes.begin(), graphemes.end(), cp);
}

std::string GraphemeSet::ToText() const {
  std::string out;
  out += "# languages: " + JoinStrings(language_ids, ",") + "\n";
  std::vector<std::string> rs;
  for (const CodepointRange& r : source_ranges)
    rs.push_back(CodepointNotation(r.lo) + "-" + CodepointNotation(r.hi));
  out += "# ranges: " + JoinStrings(rs, ",") + "\n";
  std::vector<std::string> es;
  for (char32_t cp : extras) es.push_back(CodepointNotation(cp));
  out += "# extras: " + JoinStrings(es, ",") + "\n";
  for (char32_t cp : graphemes)
    out += CodepointNotation(cp) + "\t" + Utf8Encode(cp) + "\n";
  return out;
}

GraphemeSet GraphemeSet::FromText(const std::string& text) {
  GraphemeSet gs;
  for (const std::string& raw : SplitString(text, '\n')) {
    if (raw.empty()) continue;
    if (raw[0] == '#') {
      size_t colon = raw.find(':');
      if (colon == std::string::npos) continue;
      std::string key = raw.substr(1, colon - 1);
      while (!key.empty() && key.front() == ' ') key.erase(key.begin());
      while (!key.empty() && key.back() == ' ') key.pop_back();
      std::string val = raw.substr(colon + 1);
      while (!val.empty() && val.front() == ' ') val.erase(val.begin());
      if (val.empty()) continue;
      if (key == "languages") {
        gs.language_ids = SplitString(val, ',', false);
      } else if (key == "ranges") {
        for (const std::string& r : SplitString(val, ',', false))
          gs.source_ranges.push_back(ParseCodepointRange(r));
      } else if (key == "extras") {
        for (const std::string& e : SplitString(val, ',', false))
          gs.extras.push_back(ParseCodepointNotation(e));
      }
      continue;
    }
    std::vector<std::string> f = SplitString(raw, '\t');
    if (f.empty() || f[0].empty())
      throw StageInputError("grapheme set: bad line '" + raw + "'");
    gs.graphemes.push_back(ParseCodepointNotation(f[0]));
  }
  std::sort(gs.graphemes.begin(), gs.graphemes.end());
  gs.graphemes.erase(std::unique(gs.graphemes.begin(), gs.graphemes.end()),
                     gs.graphemes.end());
  return gs;
}

void GraphemeSet::Save(const std::string& path) const {
  WriteFileText(path, ToText());
}

GraphemeSet GraphemeSet::Load(const std::string& path) {
  return FromText(ReadFileText(path));
}

GraphemeSetResult BuildGraphemeSet(const std::vector<std::string>& words,
                                   const std::vector<CodepointRange>& ranges,
                                   const std::vector<char32_t>& extras,
                                   const std::string& language_id) {
  if (ranges.empty()) throw Error("BuildGraphemeSet: no codepoint ranges");
  for (size_t i = 0; i < ranges.size(); ++i) {
    for (size_t j = i + 1; j < ranges.size(); ++j) {
      if (ranges[i].lo <= ranges[j].hi && ranges[j].lo <= ranges[i].hi)
        throw Error("BuildGraphemeSet: overlapping ranges " +
                    CodepointNotation(ranges[i].lo) + "-" +
                    CodepointNotation(ranges[i].hi) + " and " +
                    CodepointNotation(ranges[j].lo) + "-" +
                    CodepointNotation(ranges[j].hi));
    }
  }
  std::set<char32_t> extra_set(extras.begin(), extras.end());
  auto in_ranges = [&](char32_t cp) {
    for (const CodepointRange& r : ranges)
      if (r.Contains(cp)) return true;
    return false;
  };

  GraphemeSetResult result;
  std::set<char32_t> inventory(extras.begin(), extras.end());
  for (const std::string& word : words) {
    std::vector<char32_t> uncovered;
    for (char32_t cp : Utf8Decode(word)) {
      if (in_ranges(cp)) {
        inventory.insert(cp);
      } else if (!extra_set.count(cp)) {
        uncovered.push_back(cp);
      }
    }
    if (!uncovered.empty())
      result.rejected.push_back({word, std::move(uncovered)});
  }
  result.set.language_ids = {language_id};
  result.set.graphemes.assign(inventory.begin(), inventory.end());
  result.set.source_ranges = ranges;
  result.set.extras.assign(extra_set.begin(), extra_set.end());
  return result;
}

GraphemeSet UnionGraphemeSets(const std::vector<GraphemeSet>& sets) {
  if (sets.empty()) throw Error("UnionGraphemeSets: no inputs");
  GraphemeSet out;
  std::set<char32_t> inventory, extra_set;
  for (const GraphemeSet& gs : sets) {
    for (const std::string& lang : gs.language_ids) {
      if (std::find(out.language_ids.begin(), out.language_ids.end(), lang) ==
          out.language_ids.end())
        out.language_ids.push_back(lang);
    }
    inventory.insert(gs.graphemes.begin(), gs.graphemes.end());
    extra_set.insert(gs.extras.begin(), gs.extras.end());
    for (const CodepointRange& r : gs.source_ranges) {
      if (std::find(out.source_ranges.begin(), out.source_ranges.end(), r) ==
          out.source_ranges.end())
        out.source_ranges.push_back(r);
    }
  }
  out.graphemes.assign(inventory.begin(), inventory.end());
  out.extras.assign(extra_set.begin(), extra_set.end());
  return out;
}

}  // namespace gasr
