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

#ifndef GASR_SYMBOL_TABLE_HPP_
#define GASR_SYMBOL_TABLE_HPP_

#include <string>
#include <unordered_map>
#include <vector>

namespace gasr {

// Bidirectional symbol<->id map. Id 0 is always the epsilon symbol.
class SymbolTable {
 public:
  SymbolTable();

  // Returns the existing id if the symbol is present.
  int AddSymbol(const std::string& sym);
  // -1 if absent.
  int FindId(const std::string& sym) const;
  const std::string& FindSymbol(int id) const;
  bool Contains(const std::string& sym) const { return FindId(sym) >= 0; }
  int NumSymbols() const { return static_cast<int>(syms_.size()); }

  bool operator==(const SymbolTable& other) const {
    return syms_ == other.syms_;
  }
  bool operator!=(const SymbolTable& other) const { return !(*this == other); }

  // "symbol<TAB>id" lines, one per symbol, in id order.
  std::string ToText() const;
  static SymbolTable FromText(const std::string& text);
  void Save(const std::string& path) const;
  static SymbolTable Load(const std::string& path);

  static const char* kEpsilon;  // "<eps>"

 private:
  std::vector<std::string> syms_;
  std::unordered_map<std::string, int> ids_;
};

}  // namespace gasr

#endif  // GASR_SYMBOL_TABLE_HPP_
