// nerkit/error_taxonomy.h

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

#ifndef NERKIT_ERROR_TAXONOMY_H_
#define NERKIT_ERROR_TAXONOMY_H_

// Assigns every ground-truth entity, and every prediction left unpaired, to
// one error category. Stages run in order and each removes entities from
// the unmatched pools:
//   1. identical (tag, phrase)            -> correct_match
//   2. same phrase, different tag         -> tag_confusion
//   3. prediction of the same tag strictly containing a correctly
//      transcribed ground-truth phrase    -> over_detection
//   4. any other positional overlap       -> partial_overlap
//   5. unpaired ground truth              -> missed_{correct,incorrect}_asr
//   6. unpaired prediction                -> false_{correct,incorrect}_asr
// "Correct ASR" means every word takes part in a match op of the word
// alignment, the same criterion NE-ACC uses.

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "nerkit/tagformat.h"

namespace nerkit {

enum class ErrorCategory {
  kCorrectMatch,
  kTagConfusion,
  kOverDetection,
  kPartialOverlap,
  kMissedCorrectAsr,
  kMissedIncorrectAsr,
  kFalseCorrectAsr,
  kFalseIncorrectAsr,
};

inline constexpr int kNumErrorCategories = 8;

inline constexpr std::array<ErrorCategory, kNumErrorCategories>
    kAllErrorCategories = {
        ErrorCategory::kCorrectMatch,     ErrorCategory::kTagConfusion,
        ErrorCategory::kOverDetection,    ErrorCategory::kPartialOverlap,
        ErrorCategory::kMissedCorrectAsr, ErrorCategory::kMissedIncorrectAsr,
        ErrorCategory::kFalseCorrectAsr,  ErrorCategory::kFalseIncorrectAsr};

std::string_view CategoryName(ErrorCategory c);
bool IsGtSide(ErrorCategory c);

enum class EntitySide { kGroundTruth, kPrediction };

struct CategorizedEntity {
  EntitySide side;
  int index = 0;  // index into the gt or pred list
  EntityMention mention;
  ErrorCategory category;
  int paired_index = -1;  // prediction consumed by a gt-side label
  std::vector<std::string> aligned_hyp_words;
};

/// Texts are plain (delimiter free) and already normalized; mention
/// positions refer to their words. Ground-truth labels come first in gt
/// order, then unpaired predictions in pred order.
std::vector<CategorizedEntity> Categorize(
    std::string_view ref_text, const std::vector<EntityMention>& gt,
    std::string_view hyp_text, const std::vector<EntityMention>& pred);

/// Convenience form on tagged transcripts (parsed in recover mode).
std::vector<CategorizedEntity> CategorizeTagged(std::string_view ref_tagged,
                                                std::string_view hyp_tagged,
                                                const TagMap& tagmap);

struct UtteranceTrace {
  std::string utt_id;
  std::vector<CategorizedEntity> entities;
};

struct CategoryReport {
  std::array<long long, kNumErrorCategories> counts{};
  long long total_gt = 0;
  std::vector<UtteranceTrace> traces;

  long long Count(ErrorCategory c) const {
    return counts[static_cast<int>(c)];
  }
  /// Normalized by the number of ground-truth entities (both sides).
  double Rate(ErrorCategory c) const;
};

/// Throws kNoGroundTruthEntities when the corpus has no gt entities.
CategoryReport Aggregate(std::vector<UtteranceTrace> traces);

/// One JSON object per entity:
/// {utt_id, side, tag, phrase, category, aligned_hyp_words}.
std::string TraceToJsonLines(const std::vector<UtteranceTrace>& traces);
std::string CategoryReportToJson(const CategoryReport& report);
std::string CategoryReportToCsv(const CategoryReport& report);

}  // namespace nerkit

#endif  // NERKIT_ERROR_TAXONOMY_H_
