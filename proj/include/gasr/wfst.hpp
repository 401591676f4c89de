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

#ifndef GASR_WFST_HPP_
#define GASR_WFST_HPP_

#include <limits>
#include <string>
#include <vector>

#include "gasr/symbol_table.hpp"

namespace gasr {

// Weights are tropical: min is collection, + is extension, costs are
// negative logs. kInfinityWeight marks "no final weight".
constexpr double kInfinityWeight = std::numeric_limits<double>::infinity();
constexpr int kEpsilonLabel = 0;

struct Arc {
  int ilabel = kEpsilonLabel;
  int olabel = kEpsilonLabel;
  double weight = 0.0;
  int dest = -1;
};

// Weighted finite-state transducer over the tropical semiring.
// States are dense ids; a machine with zero states is the empty machine.
class Wfst {
 public:
  Wfst() = default;
  Wfst(SymbolTable isyms, SymbolTable osyms)
      : isyms_(std::move(isyms)), osyms_(std::move(osyms)) {}

  int AddState();
  int NumStates() const { return static_cast<int>(arcs_.size()); }
  void SetStart(int s);
  int Start() const { return start_; }
  void SetFinal(int s, double weight);
  double Final(int s) const;
  bool IsFinal(int s) const { return Final(s) < kInfinityWeight; }
  void AddArc(int s, const Arc& arc);
  const std::vector<Arc>& ArcsAt(int s) const;
  std::vector<Arc>& MutableArcsAt(int s);
  int NumArcs() const;

  const SymbolTable& InputSymbols() const { return isyms_; }
  const SymbolTable& OutputSymbols() const { return osyms_; }
  SymbolTable& MutableInputSymbols() { return isyms_; }
  SymbolTable& MutableOutputSymbols() { return osyms_; }

  // Text format: arc lines "src<TAB>dst<TAB>ilabel<TAB>olabel<TAB>weight"
  // (labels are numeric ids into the symbol tables), final lines
  // "state<TAB>weight". The source of the first line is the start state.
  std::string ToText() const;
  static Wfst FromText(const std::string& text, SymbolTable isyms,
                       SymbolTable osyms);
  void Save(const std::string& path) const;
  static Wfst Load(const std::string& path, SymbolTable isyms,
                   SymbolTable osyms);

 private:
  void CheckState(int s) const;

  std::vector<std::vector<Arc>> arcs_;
  std::vector<double> final_;
  int start_ = -1;
  SymbolTable isyms_;
  SymbolTable osyms_;
};

}  // namespace gasr

#endif  // GASR_WFST_HPP_
