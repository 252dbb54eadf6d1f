// src/alignment.cc

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

#include "nerkit/alignment.h"

#include <algorithm>

#include "nerkit/error.h"
#include "nerkit/text_util.h"

namespace nerkit {

int Alignment::Cost() const {
  int cost = 0;
  for (const EditOp& op : ops) cost += op.kind != EditKind::kMatch;
  return cost;
}

int Alignment::Count(EditKind kind) const {
  return static_cast<int>(std::count_if(
      ops.begin(), ops.end(), [kind](const EditOp& op) { return op.kind == kind; }));
}

std::vector<EditKind> Alignment::RefKinds(int ref_size) const {
  std::vector<EditKind> kinds(ref_size, EditKind::kDelete);
  for (const EditOp& op : ops) {
    if (op.ref_index >= 0) kinds[op.ref_index] = op.kind;
  }
  return kinds;
}

std::vector<EditKind> Alignment::HypKinds(int hyp_size) const {
  std::vector<EditKind> kinds(hyp_size, EditKind::kInsert);
  for (const EditOp& op : ops) {
    if (op.hyp_index >= 0) kinds[op.hyp_index] = op.kind;
  }
  return kinds;
}

std::vector<int> Alignment::RefToHyp(int ref_size) const {
  std::vector<int> map(ref_size, -1);
  for (const EditOp& op : ops) {
    if (op.ref_index >= 0 && op.hyp_index >= 0) map[op.ref_index] = op.hyp_index;
  }
  return map;
}

Alignment WordAlign(std::span<const std::string> ref,
                    std::span<const std::string> hyp) {
  const size_t n = ref.size(), m = hyp.size();
  // cost[i][j]: distance between ref[0,i) and hyp[0,j).
  std::vector<int> cost((n + 1) * (m + 1));
  auto at = [&](size_t i, size_t j) -> int& { return cost[i * (m + 1) + j]; };
  for (size_t i = 0; i <= n; ++i) at(i, 0) = static_cast<int>(i);
  for (size_t j = 0; j <= m; ++j) at(0, j) = static_cast<int>(j);
  for (size_t i = 1; i <= n; ++i) {
    for (size_t j = 1; j <= m; ++j) {
      int diag = at(i - 1, j - 1) + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      at(i, j) = std::min({diag, at(i - 1, j) + 1, at(i, j - 1) + 1});
    }
  }

  Alignment result;
  size_t i = n, j = m;
  while (i > 0 || j > 0) {
    int here = at(i, j);
    if (i > 0 && j > 0 && ref[i - 1] == hyp[j - 1] &&
        at(i - 1, j - 1) == here) {
      result.ops.push_back({EditKind::kMatch, static_cast<int>(i - 1),
                            static_cast<int>(j - 1)});
      --i, --j;
    } else if (i > 0 && at(i - 1, j) + 1 == here) {
      result.ops.push_back({EditKind::kDelete, static_cast<int>(i - 1), -1});
      --i;
    } else if (i > 0 && j > 0 && at(i - 1, j - 1) + 1 == here) {
      result.ops.push_back({EditKind::kSubstitute, static_cast<int>(i - 1),
                            static_cast<int>(j - 1)});
      --i, --j;
    } else {
      result.ops.push_back({EditKind::kInsert, -1, static_cast<int>(j - 1)});
      --j;
    }
  }
  std::reverse(result.ops.begin(), result.ops.end());
  return result;
}

int EditDistance(std::span<const std::string> ref,
                 std::span<const std::string> hyp) {
  if (hyp.size() > ref.size()) std::swap(ref, hyp);
  std::vector<int> row(hyp.size() + 1);
  for (size_t j = 0; j <= hyp.size(); ++j) row[j] = static_cast<int>(j);
  for (size_t i = 1; i <= ref.size(); ++i) {
    int diag = row[0];
    row[0] = static_cast<int>(i);
    for (size_t j = 1; j <= hyp.size(); ++j) {
      int up = row[j];
      row[j] = std::min({diag + (ref[i - 1] == hyp[j - 1] ? 0 : 1), up + 1,
                         row[j - 1] + 1});
      diag = up;
    }
  }
  return row[hyp.size()];
}

double WerStats::Rate() const {
  if (ref_words == 0) {
    throw Error(ErrorKind::kEmptyReference, "reference has no words");
  }
  return static_cast<double>(Errors()) / static_cast<double>(ref_words);
}

WerStats& WerStats::operator+=(const WerStats& other) {
  substitutions += other.substitutions;
  deletions += other.deletions;
  insertions += other.insertions;
  ref_words += other.ref_words;
  return *this;
}

WerStats ComputeWerStats(std::span<const std::string> ref,
                         std::span<const std::string> hyp) {
  Alignment a = WordAlign(ref, hyp);
  WerStats s;
  s.substitutions = a.Count(EditKind::kSubstitute);
  s.deletions = a.Count(EditKind::kDelete);
  s.insertions = a.Count(EditKind::kInsert);
  s.ref_words = static_cast<long long>(ref.size());
  return s;
}

double Wer(std::string_view ref, std::string_view hyp) {
  auto r = SplitWords(ref);
  auto h = SplitWords(hyp);
  if (r.empty()) throw Error(ErrorKind::kEmptyReference, "empty reference");
  return ComputeWerStats(r, h).Rate();
}

std::optional<double> NeAccStats::Rate() const {
  if (total == 0) return std::nullopt;
  return static_cast<double>(accurate) / static_cast<double>(total);
}

NeAccStats& NeAccStats::operator+=(const NeAccStats& other) {
  accurate += other.accurate;
  total += other.total;
  return *this;
}

bool MentionTranscribedCorrectly(const EntityMention& mention,
                                 std::span<const EditKind> ref_kinds) {
  for (int k = 0; k < mention.word_count; ++k) {
    size_t idx = static_cast<size_t>(mention.start_word + k);
    if (idx >= ref_kinds.size() || ref_kinds[idx] != EditKind::kMatch) {
      return false;
    }
  }
  return true;
}

NeAccStats ComputeNeAccStats(std::span<const std::string> ref,
                             const std::vector<EntityMention>& mentions,
                             std::span<const std::string> hyp) {
  NeAccStats stats;
  if (mentions.empty()) return stats;
  auto kinds = WordAlign(ref, hyp).RefKinds(static_cast<int>(ref.size()));
  for (const EntityMention& m : mentions) {
    ++stats.total;
    if (MentionTranscribedCorrectly(m, kinds)) ++stats.accurate;
  }
  return stats;
}

std::optional<double> NeAcc(std::string_view ref_text,
                            const std::vector<EntityMention>& mentions,
                            std::string_view hyp_text) {
  auto r = SplitWords(ref_text);
  auto h = SplitWords(hyp_text);
  if (std::string err = ValidateMentions(r, mentions); !err.empty()) {
    throw Error(ErrorKind::kInvalidMention, err);
  }
  return ComputeNeAccStats(r, mentions, h).Rate();
}

}  // namespace nerkit
