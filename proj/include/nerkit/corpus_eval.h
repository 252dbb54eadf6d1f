// nerkit/corpus_eval.h

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

#ifndef NERKIT_CORPUS_EVAL_H_
#define NERKIT_CORPUS_EVAL_H_

// One-pass corpus scoring: tuple F1, WER, NE-ACC and the error taxonomy.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nerkit/alignment.h"
#include "nerkit/error_taxonomy.h"
#include "nerkit/manifest.h"
#include "nerkit/ner_metrics.h"
#include "nerkit/tagformat.h"

namespace nerkit {

/// utt_id -> tagged hypothesis.
using Predictions = std::map<std::string, std::string>;

/// Either a manifest (hypothesis in tagged_text, else text) or
/// `utt_id<TAB>tagged_text` lines.
Predictions ParsePredictions(std::string_view contents);
Predictions ReadPredictions(const std::string& path);

struct EvalConfig {
  const TagMap* tagmap = nullptr;          // default map when null
  const LabelMapping* label_map = nullptr; // no mapping when null
  /// Recorded in the report; parsing always recovers, and strict callers
  /// reject reports with diagnostics.
  ParsePolicy policy = ParsePolicy::kRecover;
  int jobs = 0;
  bool keep_traces = false;
};

struct EvalDiagnostic {
  std::string utt_id;
  std::string side;  // "gt" or "pred"
  ParseDiagnostic diagnostic;
};

struct EvalResult {
  long long utterances = 0;
  long long missing_predictions = 0;
  PrfCounts prf_counts;
  PrfScores prf;
  WerStats wer_stats;
  NeAccStats ne_acc_stats;
  std::optional<double> wer;  // nullopt when the corpus has no ref words
  std::optional<CategoryReport> categories;  // nullopt without gt entities
  std::vector<EvalDiagnostic> diagnostics;
  ParsePolicy policy = ParsePolicy::kRecover;
  bool mapped_labels = false;
};

EvalResult EvalCorpus(const Manifest& gt, const Predictions& pred,
                      const EvalConfig& config);
/// Same result without OpenMP; kept as the reference for testing.
EvalResult EvalCorpusSerial(const Manifest& gt, const Predictions& pred,
                            const EvalConfig& config);

/// Schema "nerkit.eval/1".
std::string EvalReportToJson(const EvalResult& result,
                             const std::map<std::string, std::string>& config_echo);
/// metric,value rows.
std::string EvalReportToCsv(const EvalResult& result);

}  // namespace nerkit

#endif  // NERKIT_CORPUS_EVAL_H_
