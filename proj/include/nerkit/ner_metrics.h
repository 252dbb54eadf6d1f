// nerkit/ner_metrics.h

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

#ifndef NERKIT_NER_METRICS_H_
#define NERKIT_NER_METRICS_H_

#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nerkit/tagformat.h"

namespace nerkit {

/// (tag, phrase)
using EntityTuple = std::pair<std::string, std::string>;

std::vector<EntityTuple> ToTuples(const std::vector<EntityMention>& mentions);

struct TupleMatchResult {
  long long true_positive = 0;
  long long false_positive = 0;
  long long false_negative = 0;
  std::vector<std::pair<int, int>> matched_pairs;  // (gt index, pred index)
};

/// Multiset matching on exact (tag, phrase) equality: each prediction
/// consumes at most one identical ground-truth tuple. Predictions are
/// visited in order and take the first unconsumed identical ground truth.
TupleMatchResult MatchTuples(const std::vector<EntityTuple>& gt,
                             const std::vector<EntityTuple>& pred);

struct PrfScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  bool degenerate = false;  // some ratio was 0/0 and reported as 0
};

struct PrfCounts {
  long long true_positive = 0;
  long long false_positive = 0;
  long long false_negative = 0;

  PrfCounts& operator+=(const PrfCounts& other);
  PrfCounts& operator+=(const TupleMatchResult& r);
};

PrfScores MicroPrf(const PrfCounts& counts);
PrfScores MicroPrf(const std::vector<TupleMatchResult>& per_utterance);

/// Fine-to-combined tag mapping. Same file format as the tag map:
/// `FINE<TAB>COMBINED` per line, `#` comments.
class LabelMapping {
 public:
  LabelMapping() = default;
  explicit LabelMapping(std::map<std::string, std::string> pairs);

  static LabelMapping Load(const std::string& path);
  static LabelMapping Parse(std::string_view contents);
  static LabelMapping Identity(const TagMap& tagmap);
  /// The built-in stand-in mapping, identical to config/label_map.tsv.
  static const LabelMapping& Default();

  const std::map<std::string, std::string>& pairs() const { return pairs_; }
  /// Throws kUnknownFineTag.
  const std::string& Map(const std::string& fine) const;

 private:
  std::map<std::string, std::string> pairs_;
};

/// Replaces tags; spans are kept and adjacent mentions are not merged.
std::vector<EntityMention> MapLabels(const std::vector<EntityMention>& entities,
                                     const LabelMapping& mapping);

}  // namespace nerkit

#endif  // NERKIT_NER_METRICS_H_
