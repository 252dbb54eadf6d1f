// nerkit/pseudolabel.h

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

#ifndef NERKIT_PSEUDOLABEL_H_
#define NERKIT_PSEUDOLABEL_H_

// Pseudo-labeling / distillation jobs over external data. Each method labels
// an external manifest with a labeling backend and produces training records
// for a target model, an LM corpus, or both.

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nerkit/backend.h"
#include "nerkit/manifest.h"
#include "nerkit/tagformat.h"

namespace nerkit {

enum class Method {
  kSelfTrainAsr,
  kSelfTrainTxtNer,
  kPreAsr,
  kSelfTrainE2e,
  kDistillPipeline,
  kDistillTxtNerLm,
  kDistillTxtNer,
};

inline constexpr std::array<Method, 7> kAllMethods = {
    Method::kSelfTrainAsr,   Method::kSelfTrainTxtNer, Method::kPreAsr,
    Method::kSelfTrainE2e,   Method::kDistillPipeline, Method::kDistillTxtNerLm,
    Method::kDistillTxtNer};

std::string_view MethodName(Method m);
std::optional<Method> ParseMethod(std::string_view name);

struct MethodInfo {
  DataType data_type;
  std::string_view labeling_model;  // "n/a" when nothing is labeled
  std::string_view target_model;    // "n/a" when only an LM corpus results
  std::string_view lm;              // "pLabel 4-gram", "ftune 4-gram" or "n/a"
  /// Backend capabilities the method calls, in call order.
  std::vector<Capability> capabilities;
};

const MethodInfo& GetMethodInfo(Method m);

inline DataType RequiredDataType(Method m) { return GetMethodInfo(m).data_type; }

/// Throws kIncompatibleMethod unless the manifest's inferred data type is the
/// one the method consumes.
void CheckCompatible(Method m, const Manifest& manifest);

/// One backend per capability; the same object may serve several.
struct BackendBindings {
  const Backend* transcribe = nullptr;
  const Backend* tag_text = nullptr;
  const Backend* e2e_ner = nullptr;

  const Backend* For(Capability c) const;
};

struct MethodRunOptions {
  const TagMap* tagmap = nullptr;  // default map when null
  size_t batch_size = 64;
  int jobs = 1;
  /// Fine-tune manifest: appended to the pseudo-labels (merged output) and
  /// the source of the "ftune 4-gram" LM corpus.
  const Manifest* ftune = nullptr;
};

struct RecordProvenance {
  std::string utt_id;
  std::vector<ParseDiagnostic> diagnostics;
};

struct MethodRun {
  Method method;
  DataType data_type;
  Manifest pseudo;                      // role kPseudo
  std::vector<std::string> lm_corpus;   // tagged texts, one per line
  std::optional<Manifest> merged;       // when options.ftune was given
  std::vector<std::string> dropped;     // utt_ids lost to backend failures
  std::vector<std::string> collisions;  // ftune ids that shadowed pseudo ids
  std::vector<RecordProvenance> records;
  std::vector<std::pair<std::string, std::string>> backends;  // cap, identity
  std::string started;
  std::string finished;
};

/// Throws kIncompatibleMethod (data type or missing backend) and
/// kBackendFailure (every batch failed).
MethodRun RunMethod(Method method, const Manifest& external,
                    const BackendBindings& backends,
                    const MethodRunOptions& options);

/// ftune records first, then pseudo records sorted by utt_id; ftune wins on
/// utt_id collision and the shadowed ids are appended to `collisions`.
Manifest MergeDatasets(const Manifest& ftune, const Manifest& pseudo,
                       std::vector<std::string>* collisions = nullptr);

std::string ProvenanceToJson(const MethodRun& run);

/// UTC ISO-8601 time; honors SOURCE_DATE_EPOCH for reproducible output.
std::string ProvenanceTimestamp();

}  // namespace nerkit

#endif  // NERKIT_PSEUDOLABEL_H_
