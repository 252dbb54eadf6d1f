// nerkit/text_util.h

// Copyright 2026  The nerkit Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef NERKIT_TEXT_UTIL_H_
#define NERKIT_TEXT_UTIL_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nerkit {

inline bool IsSpace(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

/// Splits on runs of ASCII whitespace; never yields empty tokens.
std::vector<std::string> SplitWords(std::string_view text);

std::string JoinWords(std::span<const std::string> words,
                      std::string_view sep = " ");

/// Collapses whitespace runs to one space and trims both ends.
std::string CollapseWhitespace(std::string_view text);

/// ASCII lowercase; bytes >= 0x80 pass through untouched.
std::string ToLowerAscii(std::string_view text);

std::string_view Trim(std::string_view text);

/// Splits a line on a single-character delimiter, keeping empty fields.
std::vector<std::string> SplitFields(std::string_view line, char delim);

/// 64-bit FNV-1a; stable across platforms, used for seeding.
uint64_t Fnv1a64(std::string_view data, uint64_t seed = 0xcbf29ce484222325ULL);

/// Shortest round-trip decimal representation of a double.
std::string FormatDouble(double value);

}  // namespace nerkit

#endif  // NERKIT_TEXT_UTIL_H_
