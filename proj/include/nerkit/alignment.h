// nerkit/alignment.h

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

#ifndef NERKIT_ALIGNMENT_H_
#define NERKIT_ALIGNMENT_H_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nerkit/tagformat.h"

namespace nerkit {

enum class EditKind { kMatch, kSubstitute, kInsert, kDelete };

struct EditOp {
  EditKind kind;
  int ref_index = -1;  // -1 for insertions
  int hyp_index = -1;  // -1 for deletions

  bool operator==(const EditOp&) const = default;
};

struct Alignment {
  std::vector<EditOp> ops;

  int Cost() const;
  int Count(EditKind kind) const;

  /// For each ref word, the op it takes part in.
  std::vector<EditKind> RefKinds(int ref_size) const;
  /// For each hyp word, the op it takes part in.
  std::vector<EditKind> HypKinds(int hyp_size) const;
  /// For each ref word, the aligned hyp index (match/substitute) or -1.
  std::vector<int> RefToHyp(int ref_size) const;
};

/// Levenshtein-optimal word alignment with unit costs. The backtrace prefers
/// match, then delete, substitute, insert, so the output is deterministic.
Alignment WordAlign(std::span<const std::string> ref,
                    std::span<const std::string> hyp);

/// Edit distance only, O(min(n,m)) memory.
int EditDistance(std::span<const std::string> ref,
                 std::span<const std::string> hyp);

struct WerStats {
  long long substitutions = 0;
  long long deletions = 0;
  long long insertions = 0;
  long long ref_words = 0;

  long long Errors() const { return substitutions + deletions + insertions; }
  /// Throws kEmptyReference when ref_words == 0.
  double Rate() const;
  WerStats& operator+=(const WerStats& other);
};

WerStats ComputeWerStats(std::span<const std::string> ref,
                         std::span<const std::string> hyp);

/// Word error rate of one utterance; whitespace-tokenized. Throws
/// kEmptyReference when ref has no words. May exceed 1.
double Wer(std::string_view ref, std::string_view hyp);

struct NeAccStats {
  long long accurate = 0;
  long long total = 0;

  /// nullopt when no mentions were scored (reported as n/a, never 0).
  std::optional<double> Rate() const;
  NeAccStats& operator+=(const NeAccStats& other);
};

/// A mention is accurate iff each of its reference words takes part in a
/// match op of the alignment.
bool MentionTranscribedCorrectly(const EntityMention& mention,
                                 std::span<const EditKind> ref_kinds);

NeAccStats ComputeNeAccStats(std::span<const std::string> ref,
                             const std::vector<EntityMention>& mentions,
                             std::span<const std::string> hyp);

/// Proportion of mentions decoded correctly; nullopt for an empty set.
std::optional<double> NeAcc(std::string_view ref_text,
                            const std::vector<EntityMention>& mentions,
                            std::string_view hyp_text);

}  // namespace nerkit

#endif  // NERKIT_ALIGNMENT_H_
