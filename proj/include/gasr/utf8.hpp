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

#ifndef GASR_UTF8_HPP_
#define GASR_UTF8_HPP_

#include <cstdint>
#include <string>
#include <vector>

namespace gasr {

// Decodes UTF-8 into codepoints; throws gasr::Error on malformed input.
std::vector<char32_t> Utf8Decode(const std::string& s);

std::string Utf8Encode(char32_t cp);
std::string Utf8Encode(const std::vector<char32_t>& cps);

// "U+0915" style notation used by grapheme-set files and range configs.
std::string CodepointNotation(char32_t cp);
char32_t ParseCodepointNotation(const std::string& s);

}  // namespace gasr

#endif  // GASR_UTF8_HPP_
