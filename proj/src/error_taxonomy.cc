// src/error_taxonomy.cc

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

#include "nerkit/error_taxonomy.h"

#include <optional>

#include "json.hpp"
#include "nerkit/alignment.h"
#include "nerkit/error.h"
#include "nerkit/ner_metrics.h"
#include "nerkit/text_util.h"

namespace nerkit {

std::string_view CategoryName(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::kCorrectMatch: return "correct_match";
    case ErrorCategory::kTagConfusion: return "tag_confusion";
    case ErrorCategory::kOverDetection: return "over_detection";
    case ErrorCategory::kPartialOverlap: return "partial_overlap";
    case ErrorCategory::kMissedCorrectAsr: return "missed_correct_asr";
    case ErrorCategory::kMissedIncorrectAsr: return "missed_incorrect_asr";
    case ErrorCategory::kFalseCorrectAsr: return "false_correct_asr";
    case ErrorCategory::kFalseIncorrectAsr: return "false_incorrect_asr";
  }
  return "unknown";
}

bool IsGtSide(ErrorCategory c) {
  return c != ErrorCategory::kFalseCorrectAsr &&
         c != ErrorCategory::kFalseIncorrectAsr;
}

namespace {

struct AlignedPair {
  std::vector<std::string> ref;
  std::vector<std::string> hyp;
  std::vector<EditKind> ref_kinds;
  std::vector<EditKind> hyp_kinds;
  std::vector<int> ref_to_hyp;
};

bool GtCorrect(const EntityMention& g, const AlignedPair& a) {
  return MentionTranscribedCorrectly(g, a.ref_kinds);
}

bool InPredSpan(int hyp_index, const EntityMention& p) {
  return hyp_index >= p.start_word && hyp_index < p.start_word + p.word_count;
}

// The gt words map, through match ops, onto consecutive hyp words inside a
// strictly longer prediction span.
bool StrictlyContains(const EntityMention& p, const EntityMention& g,
                      const AlignedPair& a) {
  if (p.word_count <= g.word_count || !GtCorrect(g, a)) return false;
  for (int k = 0; k < g.word_count; ++k) {
    int h = a.ref_to_hyp[g.start_word + k];
    if (!InPredSpan(h, p)) return false;
    if (k > 0 && h != a.ref_to_hyp[g.start_word + k - 1] + 1) return false;
  }
  return true;
}

bool Overlaps(const EntityMention& p, const EntityMention& g,
              const AlignedPair& a) {
  for (int k = 0; k < g.word_count; ++k) {
    int h = a.ref_to_hyp[g.start_word + k];
    if (h >= 0 && InPredSpan(h, p)) return true;
  }
  return false;
}

std::vector<std::string> GtAlignedWords(const EntityMention& g,
                                        const AlignedPair& a) {
  std::vector<std::string> out;
  for (int k = 0; k < g.word_count; ++k) {
    int h = a.ref_to_hyp[g.start_word + k];
    if (h >= 0) out.push_back(a.hyp[h]);
  }
  return out;
}

std::vector<std::string> PredWords(const EntityMention& p,
                                   const AlignedPair& a) {
  std::vector<std::string> out;
  for (int k = 0; k < p.word_count; ++k) {
    size_t h = static_cast<size_t>(p.start_word + k);
    if (h < a.hyp.size()) out.push_back(a.hyp[h]);
  }
  return out;
}

}  // namespace

std::vector<CategorizedEntity> Categorize(
    std::string_view ref_text, const std::vector<EntityMention>& gt,
    std::string_view hyp_text, const std::vector<EntityMention>& pred) {
  AlignedPair a;
  a.ref = SplitWords(ref_text);
  a.hyp = SplitWords(hyp_text);
  Alignment alignment = WordAlign(a.ref, a.hyp);
  a.ref_kinds = alignment.RefKinds(static_cast<int>(a.ref.size()));
  a.hyp_kinds = alignment.HypKinds(static_cast<int>(a.hyp.size()));
  a.ref_to_hyp = alignment.RefToHyp(static_cast<int>(a.ref.size()));

  std::vector<std::optional<ErrorCategory>> gt_label(gt.size());
  std::vector<int> gt_pair(gt.size(), -1);
  std::vector<bool> pred_used(pred.size(), false);

  auto assign = [&](size_t g, int p, ErrorCategory c) {
    gt_label[g] = c;
    gt_pair[g] = p;
    if (p >= 0) pred_used[p] = true;
  };

  // 1. exact multiset matches
  TupleMatchResult exact = MatchTuples(ToTuples(gt), ToTuples(pred));
  for (auto [g, p] : exact.matched_pairs) {
    assign(g, p, ErrorCategory::kCorrectMatch);
  }

  // Stages 2-4 pair each remaining gt (in order) with the first remaining
  // prediction satisfying the stage predicate.
  auto pair_stage = [&](ErrorCategory c, auto&& predicate) {
    for (size_t g = 0; g < gt.size(); ++g) {
      if (gt_label[g]) continue;
      for (size_t p = 0; p < pred.size(); ++p) {
        if (pred_used[p] || !predicate(gt[g], pred[p])) continue;
        assign(g, static_cast<int>(p), c);
        break;
      }
    }
  };
  pair_stage(ErrorCategory::kTagConfusion,
             [](const EntityMention& g, const EntityMention& p) {
               return g.phrase == p.phrase && g.tag != p.tag;
             });
  pair_stage(ErrorCategory::kOverDetection,
             [&a](const EntityMention& g, const EntityMention& p) {
               return g.tag == p.tag && StrictlyContains(p, g, a);
             });
  pair_stage(ErrorCategory::kPartialOverlap,
             [&a](const EntityMention& g, const EntityMention& p) {
               return Overlaps(p, g, a);
             });

  std::vector<CategorizedEntity> out;
  out.reserve(gt.size() + pred.size());
  for (size_t g = 0; g < gt.size(); ++g) {
    ErrorCategory c;
    if (gt_label[g]) {
      c = *gt_label[g];
    } else {
      c = GtCorrect(gt[g], a) ? ErrorCategory::kMissedCorrectAsr
                              : ErrorCategory::kMissedIncorrectAsr;
    }
    out.push_back({EntitySide::kGroundTruth, static_cast<int>(g), gt[g], c,
                   gt_pair[g], GtAlignedWords(gt[g], a)});
  }
  for (size_t p = 0; p < pred.size(); ++p) {
    if (pred_used[p]) continue;
    bool correct = true;
    for (int k = 0; k < pred[p].word_count; ++k) {
      size_t h = static_cast<size_t>(pred[p].start_word + k);
      if (h >= a.hyp_kinds.size() || a.hyp_kinds[h] != EditKind::kMatch) {
        correct = false;
        break;
      }
    }
    out.push_back({EntitySide::kPrediction, static_cast<int>(p), pred[p],
                   correct ? ErrorCategory::kFalseCorrectAsr
                           : ErrorCategory::kFalseIncorrectAsr,
                   -1, PredWords(pred[p], a)});
  }
  return out;
}

std::vector<CategorizedEntity> CategorizeTagged(std::string_view ref_tagged,
                                                std::string_view hyp_tagged,
                                                const TagMap& tagmap) {
  ParsedTranscript ref = ParseTagged(ref_tagged, tagmap, ParsePolicy::kRecover);
  ParsedTranscript hyp = ParseTagged(hyp_tagged, tagmap, ParsePolicy::kRecover);
  return Categorize(ref.plain_text, ref.mentions, hyp.plain_text,
                    hyp.mentions);
}

double CategoryReport::Rate(ErrorCategory c) const {
  if (total_gt == 0) {
    throw Error(ErrorKind::kNoGroundTruthEntities, "no ground-truth entities");
  }
  return static_cast<double>(Count(c)) / static_cast<double>(total_gt);
}

CategoryReport Aggregate(std::vector<UtteranceTrace> traces) {
  CategoryReport report;
  for (const UtteranceTrace& t : traces) {
    for (const CategorizedEntity& e : t.entities) {
      ++report.counts[static_cast<int>(e.category)];
      if (e.side == EntitySide::kGroundTruth) ++report.total_gt;
    }
  }
  if (report.total_gt == 0) {
    throw Error(ErrorKind::kNoGroundTruthEntities,
                "corpus has no ground-truth entities");
  }
  report.traces = std::move(traces);
  return report;
}

std::string TraceToJsonLines(const std::vector<UtteranceTrace>& traces) {
  std::string out;
  for (const UtteranceTrace& t : traces) {
    for (const CategorizedEntity& e : t.entities) {
      nlohmann::ordered_json j;
      j["utt_id"] = t.utt_id;
      j["side"] = e.side == EntitySide::kGroundTruth ? "gt" : "pred";
      j["tag"] = e.mention.tag;
      j["phrase"] = e.mention.phrase;
      j["category"] = CategoryName(e.category);
      j["aligned_hyp_words"] = e.aligned_hyp_words;
      out += j.dump();
      out += '\n';
    }
  }
  return out;
}

std::string CategoryReportToJson(const CategoryReport& report) {
  nlohmann::ordered_json j;
  j["total_gt"] = report.total_gt;
  for (ErrorCategory c : kAllErrorCategories) {
    nlohmann::ordered_json entry;
    entry["count"] = report.Count(c);
    entry["rate"] = report.Rate(c);
    j["categories"][std::string(CategoryName(c))] = entry;
  }
  return j.dump(2);
}

std::string CategoryReportToCsv(const CategoryReport& report) {
  std::string out = "category,side,count,rate\n";
  for (ErrorCategory c : kAllErrorCategories) {
    out += std::string(CategoryName(c)) + ',' + (IsGtSide(c) ? "gt" : "pred") +
           ',' + std::to_string(report.Count(c)) + ',' +
           FormatDouble(report.Rate(c)) + '\n';
  }
  return out;
}

}  // namespace nerkit
