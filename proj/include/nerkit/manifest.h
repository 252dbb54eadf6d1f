// nerkit/manifest.h

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

#ifndef NERKIT_MANIFEST_H_
#define NERKIT_MANIFEST_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nerkit/tagformat.h"

namespace nerkit {

enum class SplitRole {
  kUnspecified,
  kFineTune,
  kDev,
  kExt100h,
  kExt500h,
  kExtNer,
  kPseudo,
  kMerged,
};

std::string_view SplitRoleName(SplitRole role);
std::optional<SplitRole> ParseSplitRole(std::string_view name);

/// External data types: unlabeled speech, unlabeled text, transcribed speech.
enum class DataType { kUnSp, kUnTxt, kSpTxt };

inline constexpr DataType kAllDataTypes[] = {DataType::kUnSp, DataType::kUnTxt,
                                             DataType::kSpTxt};

std::string_view DataTypeName(DataType t);
std::optional<DataType> ParseDataType(std::string_view name);

/// Empty strings mean "absent"; mentions are absent when nullopt.
struct ManifestRecord {
  std::string utt_id;
  std::string audio_ref;
  std::string text;
  std::string tagged_text;
  std::optional<std::vector<EntityMention>> mentions;

  bool HasText() const { return !text.empty() || !tagged_text.empty(); }
};

struct Manifest {
  SplitRole role = SplitRole::kUnspecified;
  std::vector<ManifestRecord> records;
};

/// TSV with a header row:
///   utt_id  audio_ref  text  tagged_text  mentions_json
/// mentions_json is a JSON array of
///   {"tag":..,"phrase":..,"start_word":..,"word_count":..}.
Manifest ParseManifest(std::string_view contents, SplitRole role);
Manifest ReadManifest(const std::string& path, SplitRole role);
std::string ManifestToTsv(const Manifest& manifest);
void WriteManifest(const Manifest& manifest, const std::string& path);

std::string MentionsToJson(const std::vector<EntityMention>& mentions);
std::vector<EntityMention> MentionsFromJson(std::string_view json);

/// Unique ids, audio or text on every record, mentions consistent with the
/// text. Throws kInvalidManifest.
void ValidateManifest(const Manifest& manifest);

/// All audio, no text -> Un-Sp; all text, no audio -> Un-Txt; both ->
/// Sp-Txt. Throws kInvalidManifest for empty or mixed manifests.
DataType InferDataType(const Manifest& manifest);

/// Plain text and mentions of a labeled record: tagged_text is parsed when
/// present, otherwise text + mentions are used.
ParsedTranscript RecordLabels(const ManifestRecord& record,
                              const TagMap& tagmap, ParsePolicy policy);

}  // namespace nerkit

#endif  // NERKIT_MANIFEST_H_
