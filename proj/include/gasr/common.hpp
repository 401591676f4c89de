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

#ifndef GASR_COMMON_HPP_
#define GASR_COMMON_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace gasr {

// Base error for everything raised by the toolkit.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad configuration or command-line usage (CLI exit code 1).
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

// Missing or malformed stage input (CLI exit code 2).
class StageInputError : public Error {
 public:
  explicit StageInputError(const std::string& msg) : Error(msg) {}
};

// Decoder found no surviving token (CLI exit code 3).
class SearchFailure : public Error {
 public:
  explicit SearchFailure(const std::string& msg) : Error(msg) {}
};

std::vector<std::string> SplitString(const std::string& s, char sep,
                                     bool keep_empty = true);
std::vector<std::string> SplitWhitespace(const std::string& s);
std::string JoinStrings(const std::vector<std::string>& parts,
                        const std::string& sep);

std::string ReadFileText(const std::string& path);
void WriteFileText(const std::string& path, const std::string& content);
std::vector<std::string> ReadLines(const std::string& path);

// FNV-1a, the per-artifact content hash recorded in stage MANIFEST files.
uint64_t Fnv1a64(const void* data, size_t size);
uint64_t Fnv1a64(const std::string& s);
uint64_t HashFile(const std::string& path);
std::string HashHex(uint64_t h);

}  // namespace gasr

#endif  // GASR_COMMON_HPP_
