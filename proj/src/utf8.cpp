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

#include "gasr/utf8.hpp"

#include <cstdio>

#include "gasr/common.hpp"

namespace gasr {

std::vector<char32_t> Utf8Decode(const std::string& s) {
  std::vector<char32_t> out;
  size_t i = 0;
  while (i < s.size()) {
    unsigned char b0 = s[i];
    char32_t cp = 0;
    int extra = 0;
    if (b0 < 0x80) {
      cp = b0;
    } else if ((b0 & 0xe0) == 0xc0) {
      cp = b0 & 0x1f;
      extra = 1;
    } else if ((b0 & 0xf0) == 0xe0) {
      cp = b0 & 0x0f;
      extra = 2;
    } else if ((b0 & 0xf8) == 0xf0) {
      cp = b0 & 0x07;
      extra = 3;
    } else {
      throw Error("malformed UTF-8 at byte " + std::to_string(i));
    }
    if (i + extra >= s.size())
      throw Error("truncated UTF-8 sequence at byte " + std::to_string(i));
    for (int k = 1; k <= extra; ++k) {
      unsigned char b = s[i + k];
      if ((b & 0xc0) != 0x80)
        throw Error("malformed UTF-8 continuation at byte " +
                    std::to_string(i + k));
      cp = (cp << 6) | (b & 0x3f);
    }
    // Reject overlong encodings and out-of-range scalars.
    static const char32_t kMin[4] = {0, 0x80, 0x800, 0x10000};
    if (cp < kMin[extra] || cp > 0x10ffff ||
        (cp >= 0xd800 && cp <= 0xdfff))
      throw Error("invalid UTF-8 scalar at byte " + std::to_string(i));
    out.push_back(cp);
    i += extra + 1;
  }
  return out;
}

std::string Utf8Encode(char32_t cp) {
  std::string out;
  if (cp <= 0x7f) {
    out.push_back(static_cast<char>(cp));
  } else if (cp <= 0x7ff) {
    out.push_back(static_cast<char>(0xc0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
  } else if (cp <= 0xffff) {
    out.push_back(static_cast<char>(0xe0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
  } else if (cp <= 0x10ffff) {
    out.push_back(static_cast<char>(0xf0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3f)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
  } else {
    throw Error("codepoint out of range");
  }
  return out;
}

std::string Utf8Encode(const std::vector<char32_t>& cps) {
  std::string out;
  for (char32_t cp : cps) out += Utf8Encode(cp);
  return out;
}

std::string CodepointNotation(char32_t cp) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "U+%04X", static_cast<unsigned>(cp));
  return buf;
}

char32_t ParseCodepointNotation(const std::string& s) {
  if (s.size() < 3 || (s[0] != 'U' && s[0] != 'u') || s[1] != '+')
    throw Error("bad codepoint notation: " + s);
  char32_t cp = 0;
  for (size_t i = 2; i < s.size(); ++i) {
    char c = s[i];
    int d;
    if (c >= '0' && c <= '9') d = c - '0';
    else if (c >= 'a' && c <= 'f') d = c - 'a' + 10;
    else if (c >= 'A' && c <= 'F') d = c - 'A' + 10;
    else throw Error("bad codepoint notation: " + s);
    cp = cp * 16 + d;
    if (cp > 0x10ffff) throw Error("codepoint out of range: " + s);
  }
  return cp;
}

}  // namespace gasr
