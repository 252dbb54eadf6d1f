// src/manifest.cc

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

#include "nerkit/manifest.h"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "nerkit/error.h"
#include "nerkit/text_util.h"

namespace nerkit {

namespace {

constexpr std::string_view kHeader =
    "utt_id\taudio_ref\ttext\ttagged_text\tmentions_json";

constexpr std::pair<SplitRole, std::string_view> kRoleNames[] = {
    {SplitRole::kUnspecified, "unspecified"}, {SplitRole::kFineTune, "fine-tune"},
    {SplitRole::kDev, "dev"},                 {SplitRole::kExt100h, "ext-100h"},
    {SplitRole::kExt500h, "ext-500h"},        {SplitRole::kExtNer, "ext-NER"},
    {SplitRole::kPseudo, "pseudo"},           {SplitRole::kMerged, "merged"},
};

}  // namespace

std::string_view SplitRoleName(SplitRole role) {
  for (auto [r, name] : kRoleNames) {
    if (r == role) return name;
  }
  return "unspecified";
}

std::optional<SplitRole> ParseSplitRole(std::string_view name) {
  for (auto [r, n] : kRoleNames) {
    if (n == name) return r;
  }
  return std::nullopt;
}

std::string_view DataTypeName(DataType t) {
  switch (t) {
    case DataType::kUnSp: return "Un-Sp";
    case DataType::kUnTxt: return "Un-Txt";
    case DataType::kSpTxt: return "Sp-Txt";
  }
  return "?";
}

std::optional<DataType> ParseDataType(std::string_view name) {
  for (DataType t : kAllDataTypes) {
    if (DataTypeName(t) == name) return t;
  }
  return std::nullopt;
}

std::string MentionsToJson(const std::vector<EntityMention>& mentions) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const EntityMention& m : mentions) {
    nlohmann::ordered_json j;
    j["tag"] = m.tag;
    j["phrase"] = m.phrase;
    j["start_word"] = m.start_word;
    j["word_count"] = m.word_count;
    arr.push_back(std::move(j));
  }
  return arr.dump();
}

std::vector<EntityMention> MentionsFromJson(std::string_view json) {
  std::vector<EntityMention> out;
  try {
    auto arr = nlohmann::json::parse(json);
    if (!arr.is_array()) {
      throw Error(ErrorKind::kInvalidManifest, "mentions_json is not an array");
    }
    for (const auto& j : arr) {
      out.push_back({j.at("tag").get<std::string>(),
                     j.at("phrase").get<std::string>(),
                     j.at("start_word").get<int>(), j.at("word_count").get<int>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kInvalidManifest,
                std::string("bad mentions_json: ") + e.what());
  }
  return out;
}

Manifest ParseManifest(std::string_view contents, SplitRole role) {
  Manifest m;
  m.role = role;
  std::istringstream in{std::string(contents)};
  std::string line;
  int lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!header) {
      if (line != kHeader) {
        throw Error(ErrorKind::kInvalidManifest,
                    "missing header row '" + std::string(kHeader) + "'");
      }
      header = true;
      continue;
    }
    if (Trim(line).empty()) continue;
    auto fields = SplitFields(line, '\t');
    if (fields.size() != 5) {
      throw Error(ErrorKind::kInvalidManifest,
                  "line " + std::to_string(lineno) + ": expected 5 fields, got " +
                      std::to_string(fields.size()));
    }
    ManifestRecord r;
    r.utt_id = fields[0];
    r.audio_ref = fields[1];
    r.text = fields[2];
    r.tagged_text = fields[3];
    if (!fields[4].empty()) r.mentions = MentionsFromJson(fields[4]);
    m.records.push_back(std::move(r));
  }
  if (!header) throw Error(ErrorKind::kInvalidManifest, "empty manifest file");
  ValidateManifest(m);
  return m;
}

Manifest ReadManifest(const std::string& path, SplitRole role) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open manifest " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ParseManifest(ss.str(), role);
}

std::string ManifestToTsv(const Manifest& manifest) {
  std::string out(kHeader);
  out += '\n';
  auto check = [](const std::string& field, const std::string& id) {
    if (field.find_first_of("\t\n\r") != std::string::npos) {
      throw Error(ErrorKind::kInvalidManifest,
                  "record " + id + " has a field with a tab or newline");
    }
    return field;
  };
  for (const ManifestRecord& r : manifest.records) {
    out += check(r.utt_id, r.utt_id) + '\t' + check(r.audio_ref, r.utt_id) + '\t' +
           check(r.text, r.utt_id) + '\t' + check(r.tagged_text, r.utt_id) + '\t';
    if (r.mentions) out += MentionsToJson(*r.mentions);
    out += '\n';
  }
  return out;
}

void WriteManifest(const Manifest& manifest, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write manifest " + path);
  out << ManifestToTsv(manifest);
}

void ValidateManifest(const Manifest& manifest) {
  std::set<std::string> ids;
  for (const ManifestRecord& r : manifest.records) {
    if (r.utt_id.empty()) throw Error(ErrorKind::kInvalidManifest, "empty utt_id");
    if (!ids.insert(r.utt_id).second) {
      throw Error(ErrorKind::kInvalidManifest, "duplicate utt_id " + r.utt_id);
    }
    if (r.audio_ref.empty() && !r.HasText()) {
      throw Error(ErrorKind::kInvalidManifest,
                  "record " + r.utt_id + " has neither audio_ref nor text");
    }
    if (r.mentions && !r.text.empty()) {
      std::string err = ValidateMentions(SplitWords(r.text), *r.mentions);
      if (!err.empty()) {
        throw Error(ErrorKind::kInvalidManifest, "record " + r.utt_id + ": " + err);
      }
    }
  }
}

DataType InferDataType(const Manifest& manifest) {
  if (manifest.records.empty()) {
    throw Error(ErrorKind::kInvalidManifest, "manifest has no records");
  }
  bool any_audio = false, all_audio = true, any_text = false, all_text = true;
  for (const ManifestRecord& r : manifest.records) {
    bool a = !r.audio_ref.empty(), t = r.HasText();
    any_audio |= a;
    all_audio &= a;
    any_text |= t;
    all_text &= t;
  }
  if (all_audio && !any_text) return DataType::kUnSp;
  if (all_text && !any_audio) return DataType::kUnTxt;
  if (all_audio && all_text) return DataType::kSpTxt;
  throw Error(ErrorKind::kInvalidManifest,
              "manifest mixes records of different data types");
}

ParsedTranscript RecordLabels(const ManifestRecord& record,
                              const TagMap& tagmap, ParsePolicy policy) {
  if (!record.tagged_text.empty()) {
    return ParseTagged(record.tagged_text, tagmap, policy);
  }
  ParsedTranscript p;
  p.plain_text = CollapseWhitespace(record.text);
  if (record.mentions) p.mentions = *record.mentions;
  return p;
}

}  // namespace nerkit
