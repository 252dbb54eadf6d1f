// src/text_util.cc

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

#include "nerkit/text_util.h"

#include <charconv>
#include <cmath>

#include "nerkit/error.h"

namespace nerkit {

std::string_view ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kUnknownTag: return "UnknownTag";
    case ErrorKind::kOverlap: return "OverlapError";
    case ErrorKind::kInvalidMention: return "InvalidMention";
    case ErrorKind::kInvalidTagMap: return "InvalidTagMap";
    case ErrorKind::kMalformedTagging: return "MalformedTagging";
    case ErrorKind::kEmptyReference: return "EmptyReference";
    case ErrorKind::kUnknownFineTag: return "UnknownFineTag";
    case ErrorKind::kNoGroundTruthEntities: return "NoGroundTruthEntities";
    case ErrorKind::kEmptyCorpus: return "EmptyCorpus";
    case ErrorKind::kOrderOutOfRange: return "OrderOutOfRange";
    case ErrorKind::kInvalidArpa: return "InvalidArpa";
    case ErrorKind::kInvalidPosteriors: return "InvalidPosteriors";
    case ErrorKind::kInvalidAlphabet: return "InvalidAlphabet";
    case ErrorKind::kBeamWidthZero: return "BeamWidthZero";
    case ErrorKind::kSequenceLongerThanFrames: return "SequenceLongerThanFrames";
    case ErrorKind::kBackendFailure: return "BackendFailure";
    case ErrorKind::kIncompatibleMethod: return "IncompatibleMethod";
    case ErrorKind::kInvalidManifest: return "InvalidManifest";
    case ErrorKind::kDuplicateLabel: return "DuplicateLabel";
    case ErrorKind::kIo: return "IoError";
    case ErrorKind::kUsage: return "UsageError";
  }
  return "Unknown";
}

std::vector<std::string> SplitWords(std::string_view text) {
  std::vector<std::string> words;
  size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && IsSpace(text[i])) ++i;
    size_t start = i;
    while (i < text.size() && !IsSpace(text[i])) ++i;
    if (i > start) words.emplace_back(text.substr(start, i - start));
  }
  return words;
}

std::string JoinWords(std::span<const std::string> words,
                      std::string_view sep) {
  std::string out;
  for (size_t i = 0; i < words.size(); ++i) {
    if (i > 0) out.append(sep);
    out.append(words[i]);
  }
  return out;
}

std::string CollapseWhitespace(std::string_view text) {
  auto words = SplitWords(text);
  return JoinWords(words);
}

std::string ToLowerAscii(std::string_view text) {
  std::string out(text);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::string_view Trim(std::string_view text) {
  size_t b = 0, e = text.size();
  while (b < e && IsSpace(text[b])) ++b;
  while (e > b && IsSpace(text[e - 1])) --e;
  return text.substr(b, e - b);
}

std::vector<std::string> SplitFields(std::string_view line, char delim) {
  std::vector<std::string> fields;
  size_t start = 0;
  while (true) {
    size_t pos = line.find(delim, start);
    if (pos == std::string_view::npos) {
      fields.emplace_back(line.substr(start));
      break;
    }
    fields.emplace_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

uint64_t Fnv1a64(std::string_view data, uint64_t seed) {
  uint64_t h = seed;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string FormatDouble(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

}  // namespace nerkit
