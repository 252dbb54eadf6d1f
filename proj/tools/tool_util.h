// tools/tool_util.h

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

#ifndef NERKIT_TOOLS_TOOL_UTIL_H_
#define NERKIT_TOOLS_TOOL_UTIL_H_

// Helpers shared by the command-line tools.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "nerkit/backend.h"
#include "nerkit/corpus_eval.h"
#include "nerkit/error.h"
#include "nerkit/tagformat.h"
#include "nerkit/text_util.h"

namespace nerkit::tools {

// sysexits-style codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitDiagnostics = 2;
inline constexpr int kExitUsage = 64;
inline constexpr int kExitDataErr = 65;
inline constexpr int kExitUnavailable = 69;
inline constexpr int kExitIoErr = 74;

inline int ExitCodeFor(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kIo: return kExitIoErr;
    case ErrorKind::kUsage:
    case ErrorKind::kBeamWidthZero:
    case ErrorKind::kOrderOutOfRange:
    case ErrorKind::kIncompatibleMethod:
    case ErrorKind::kDuplicateLabel: return kExitUsage;
    case ErrorKind::kMalformedTagging: return kExitDiagnostics;
    case ErrorKind::kBackendFailure: return kExitUnavailable;
    default: return kExitDataErr;
  }
}

inline std::string ReadFileOrStdin(const std::string& path) {
  std::stringstream ss;
  if (path == "-") {
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path);
  ss << in.rdbuf();
  return ss.str();
}

inline void WriteFileOrStdout(const std::string& path, const std::string& data) {
  if (path.empty() || path == "-") {
    std::cout << data;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path);
  out << data;
  if (!out) throw Error(ErrorKind::kIo, "write failed for " + path);
}

// Explicit path, else $NERKIT_CONFIG/<name> when present, else empty.
inline std::string ConfigPath(const std::string& explicit_path,
                              const char* name) {
  if (!explicit_path.empty()) return explicit_path;
  if (const char* dir = std::getenv("NERKIT_CONFIG")) {
    std::filesystem::path p = std::filesystem::path(dir) / name;
    if (std::filesystem::exists(p)) return p.string();
  }
  return "";
}

inline TagMap LoadTagMap(const std::string& path) {
  return path.empty() ? TagMap::Default() : TagMap::Load(path);
}

struct MockFlags {
  std::string refs;       // manifest or utt_id<TAB>text lines
  std::string gazetteer;  // phrase<TAB>TAG; derived from tagged refs if empty
  double noise = 0.0;     // total rate, split 1/2 sub, 1/4 del, 1/4 ins
  double sub = -1.0, del = -1.0, ins = -1.0;  // explicit rates override
  double fail = 0.0;
  uint64_t seed = 0;
};

inline MockBackendOptions BuildMockOptions(const MockFlags& f,
                                           const TagMap& tagmap) {
  MockBackendOptions opt;
  opt.seed = f.seed;
  opt.failure_rate = f.fail;
  opt.tagmap = tagmap;
  opt.noise = NoiseModel::Uniform(f.noise);
  if (f.sub >= 0) opt.noise.sub_rate = f.sub;
  if (f.del >= 0) opt.noise.del_rate = f.del;
  if (f.ins >= 0) opt.noise.ins_rate = f.ins;
  std::vector<std::string> tagged;
  if (!f.refs.empty()) {
    for (auto& [id, text] : ReadPredictions(f.refs)) {
      opt.hidden_refs[id] = StripTags(ToLowerAscii(text), tagmap);
      tagged.push_back(ToLowerAscii(text));
    }
  }
  opt.gazetteer = f.gazetteer.empty() ? Gazetteer::FromTagged(tagged, tagmap)
                                      : Gazetteer::Load(f.gazetteer);
  return opt;
}

inline std::string CsvField(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace nerkit::tools

#endif  // NERKIT_TOOLS_TOOL_UTIL_H_
