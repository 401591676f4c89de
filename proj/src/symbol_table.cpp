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

#include "gasr/symbol_table.hpp"

#include "gasr/common.hpp"

namespace gasr {

const char* SymbolTable::kEpsilon = "<eps>";

SymbolTable::SymbolTable() { AddSymbol(kEpsilon); }

int SymbolTable::AddSymbol(const std::string& sym) {
  auto it = ids_.find(sym);
  if (it != ids_.end()) return it->second;
  int id = static_cast<int>(syms_.size());
  syms_.push_back(sym);
  ids_.emplace(sym, id);
  return id;
}

int SymbolTable::FindId(const std::string& sym) const {
  auto it = ids_.find(sym);
  return it == ids_.end() ? -1 : it->second;
}

const std::string& SymbolTable::FindSymbol(int id) const {
  if (id < 0 || id >= NumSymbols())
    throw Error("symbol id out of range: " + std::to_string(id));
  return syms_[id];
}

std::string SymbolTable::ToText() const {
  std::string out;
  for (int i = 0; i < NumSymbols(); ++i) {
    out += syms_[i];
    out += '\t';
    out += std::to_string(i);
    out += '\n';
  }
  return out;
}

SymbolTable SymbolTable::FromText(const std::string& text) {
  SymbolTable table;
  std::vector<std::string> lines = SplitString(text, '\n');
  int next = 0;
  for (size_t ln = 0; ln < lines.size(); ++ln) {
    const std::string& line = lines[ln];
    if (line.empty()) continue;
    std::vector<std::string> f = SplitString(line, '\t');
    if (f.size() != 2)
      throw StageInputError("symbol table line " + std::to_string(ln + 1) +
                            ": expected symbol<TAB>id");
    int id = std::stoi(f[1]);
    if (id != next)
      throw StageInputError("symbol table line " + std::to_string(ln + 1) +
                            ": ids must be dense and ascending");
    if (id == 0) {
      if (f[0] != kEpsilon)
        throw StageInputError("symbol table: id 0 must be " +
                              std::string(kEpsilon));
    } else {
      table.AddSymbol(f[0]);
    }
    ++next;
  }
  return table;
}

void SymbolTable::Save(const std::string& path) const {
  WriteFileText(path, ToText());
}

SymbolTable SymbolTable::Load(const std::string& path) {
  return FromText(ReadFileText(path));
}

}  // namespace gasr
