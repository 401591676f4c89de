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

#include "gasr/wfst.hpp"

#include <cstdio>
#include <cstdlib>

#include "gasr/common.hpp"

namespace gasr {

int Wfst::AddState() {
  arcs_.emplace_back();
  final_.push_back(kInfinityWeight);
  return NumStates() - 1;
}

void Wfst::CheckState(int s) const {
  if (s < 0 || s >= NumStates())
    throw Error("state id out of range: " + std::to_string(s));
}

void Wfst::SetStart(int s) {
  CheckState(s);
  start_ = s;
}

void Wfst::SetFinal(int s, double weight) {
  CheckState(s);
  final_[s] = weight;
}

double Wfst::Final(int s) const {
  CheckState(s);
  return final_[s];
}

void Wfst::AddArc(int s, const Arc& arc) {
  CheckState(s);
  CheckState(arc.dest);
  if (arc.ilabel < 0 || arc.ilabel >= isyms_.NumSymbols())
    throw Error("arc input label out of range: " + std::to_string(arc.ilabel));
  if (arc.olabel < 0 || arc.olabel >= osyms_.NumSymbols())
    throw Error("arc output label out of range: " +
                std::to_string(arc.olabel));
  arcs_[s].push_back(arc);
}

const std::vector<Arc>& Wfst::ArcsAt(int s) const {
  CheckState(s);
  return arcs_[s];
}

std::vector<Arc>& Wfst::MutableArcsAt(int s) {
  CheckState(s);
  return arcs_[s];
}

int Wfst::NumArcs() const {
  int n = 0;
  for (const auto& a : arcs_) n += static_cast<int>(a.size());
  return n;
}

static std::string WeightToText(double w) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", w);
  return buf;
}

std::string Wfst::ToText() const {
  if (NumStates() == 0) return "";
  if (start_ < 0) throw Error("serializing a machine with no start state");
  std::string out;
  auto emit_state = [&](int s) {
    for (const Arc& a : arcs_[s]) {
      out += std::to_string(s);
      out += '\t';
      out += std::to_string(a.dest);
      out += '\t';
      out += std::to_string(a.ilabel);
      out += '\t';
      out += std::to_string(a.olabel);
      out += '\t';
      out += WeightToText(a.weight);
      out += '\n';
    }
  };
  // The start state's block comes first so readers can recover it.
  emit_state(start_);
  // A start state without arcs still needs an identifying first line.
  if (arcs_[start_].empty() && final_[start_] >= kInfinityWeight)
    throw Error("start state has no arcs and no final weight");
  if (final_[start_] < kInfinityWeight)
    out += std::to_string(start_) + '\t' + WeightToText(final_[start_]) + '\n';
  for (int s = 0; s < NumStates(); ++s) {
    if (s == start_) continue;
    emit_state(s);
    if (final_[s] < kInfinityWeight)
      out += std::to_string(s) + '\t' + WeightToText(final_[s]) + '\n';
  }
  return out;
}

static double ParseWeight(const std::string& s, size_t line_no) {
  char* end = nullptr;
  double w = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0')
    throw StageInputError("fst line " + std::to_string(line_no) +
                          ": bad weight '" + s + "'");
  return w;
}

Wfst Wfst::FromText(const std::string& text, SymbolTable isyms,
                    SymbolTable osyms) {
  Wfst fst(std::move(isyms), std::move(osyms));
  std::vector<std::string> lines = SplitString(text, '\n');
  auto ensure_state = [&](int s) {
    while (fst.NumStates() <= s) fst.AddState();
  };
  bool have_start = false;
  for (size_t ln = 0; ln < lines.size(); ++ln) {
    const std::string& line = lines[ln];
    if (line.empty()) continue;
    std::vector<std::string> f = SplitString(line, '\t');
    if (f.size() == 1) {
      // Final state with weight 0, as the common text format allows.
      int s = std::stoi(f[0]);
      ensure_state(s);
      fst.SetFinal(s, 0.0);
      if (!have_start) {
        fst.SetStart(s);
        have_start = true;
      }
    } else if (f.size() == 2) {
      int s = std::stoi(f[0]);
      ensure_state(s);
      fst.SetFinal(s, ParseWeight(f[1], ln + 1));
      if (!have_start) {
        fst.SetStart(s);
        have_start = true;
      }
    } else if (f.size() == 4 || f.size() == 5) {
      Arc arc;
      int s = std::stoi(f[0]);
      arc.dest = std::stoi(f[1]);
      arc.ilabel = std::stoi(f[2]);
      arc.olabel = std::stoi(f[3]);
      arc.weight = f.size() == 5 ? ParseWeight(f[4], ln + 1) : 0.0;
      ensure_state(s);
      ensure_state(arc.dest);
      fst.AddArc(s, arc);
      if (!have_start) {
        fst.SetStart(s);
        have_start = true;
      }
    } else {
      throw StageInputError("fst line " + std::to_string(ln + 1) +
                            ": expected 1, 2, 4 or 5 tab-separated fields");
    }
  }
  return fst;
}

void Wfst::Save(const std::string& path) const {
  WriteFileText(path, ToText());
}

Wfst Wfst::Load(const std::string& path, SymbolTable isyms,
                SymbolTable osyms) {
  return FromText(ReadFileText(path), std::move(isyms), std::move(osyms));
}

}  // namespace gasr
