// nerkit/ngram_lm.h

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

#ifndef NERKIT_NGRAM_LM_H_
#define NERKIT_NGRAM_LM_H_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace nerkit {

using WordId = uint32_t;

inline constexpr std::string_view kBos = "<s>";
inline constexpr std::string_view kEos = "</s>";
inline constexpr std::string_view kUnk = "<unk>";

/// Log10 value written for <s>, which is never predicted.
inline constexpr double kLogZero = -99.0;

struct WordIdsHash {
  size_t operator()(const std::vector<WordId>& ids) const noexcept {
    uint64_t h = 0x9e3779b97f4a7c15ULL;
    for (WordId id : ids) {
      h ^= id + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return static_cast<size_t>(h);
  }
};

class Vocabulary {
 public:
  /// Ids 0, 1, 2 are <s>, </s>, <unk>.
  Vocabulary();

  WordId Intern(std::string_view word);
  /// kNotFound when absent.
  WordId Find(std::string_view word) const;
  const std::string& Word(WordId id) const { return words_[id]; }
  size_t size() const { return words_.size(); }

  static constexpr WordId kBosId = 0;
  static constexpr WordId kEosId = 1;
  static constexpr WordId kUnkId = 2;
  static constexpr WordId kNotFound = 0xffffffffu;

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, WordId> index_;
};

/// Raw n-gram counts for orders 1..order over sentences padded with one <s>
/// and one </s>. Count tables from disjoint shards merge by addition.
class NgramCounts {
 public:
  using Table = std::unordered_map<std::vector<WordId>, long long, WordIdsHash>;

  explicit NgramCounts(int order);

  /// `ids` excludes the boundary tokens.
  void AddSentence(std::span<const WordId> ids);
  void Merge(const NgramCounts& other);

  int order() const { return static_cast<int>(tables_.size()); }
  const Table& table(int n) const { return tables_[n - 1]; }
  long long Get(const std::vector<WordId>& ngram) const;

 private:
  std::vector<Table> tables_;
};

/// Tokenizes a corpus (one sentence per string) into ids, interning every
/// word. Literal boundary tokens in the text are dropped.
std::vector<std::vector<WordId>> InternCorpus(
    const std::vector<std::string>& sentences, Vocabulary* vocab);

NgramCounts CountNgramsSerial(const std::vector<std::vector<WordId>>& corpus,
                              int order);
/// OpenMP shard-and-merge counting; jobs <= 0 uses the runtime default.
NgramCounts CountNgrams(const std::vector<std::vector<WordId>>& corpus,
                        int order, int jobs = 0);

/// Back-off n-gram model with log10 probabilities.
class ArpaLm {
 public:
  struct Entry {
    double logprob = 0.0;
    double backoff = 0.0;
    bool has_backoff = false;
  };
  using Table = std::unordered_map<std::vector<WordId>, Entry, WordIdsHash>;

  ArpaLm() = default;
  ArpaLm(Vocabulary vocab, std::vector<Table> tables);

  static ArpaLm Read(const std::string& path);
  static ArpaLm ParseArpa(std::string_view contents);
  void Write(const std::string& path) const;
  std::string ToArpa() const;

  int order() const { return static_cast<int>(tables_.size()); }
  const Vocabulary& vocab() const { return vocab_; }
  const Table& table(int n) const { return tables_[n - 1]; }
  bool has_unk() const;

  /// Id used to score `word`: its own id, <unk> for OOV words, or
  /// Vocabulary::kNotFound in a closed-vocabulary model.
  WordId ScoringId(std::string_view word) const;

  /// log10 P(word | history) with back-off; history is oldest first and
  /// may be longer than order-1. Returns -inf for kNotFound.
  double Score(std::span<const WordId> history, WordId word) const;

  /// Words that can be predicted: every unigram except <s>.
  std::vector<WordId> PredictableWords() const;

  /// Sum of per-word log10 probabilities including the </s> term.
  double LogProb(std::span<const std::string> words) const;
  double LogProb(std::string_view sentence) const;

 private:
  const Entry* Find(const std::vector<WordId>& ngram) const;

  Vocabulary vocab_;
  std::vector<Table> tables_;
};

enum class Smoothing { kKneserNey, kWittenBell };

struct LmTrainOptions {
  int order = 4;
  Smoothing smoothing = Smoothing::kKneserNey;
  /// Without <unk>, OOV words score -inf.
  bool closed_vocabulary = false;
  int jobs = 0;
};

struct LmTrainInfo {
  /// Per order: "modified_kneser_ney" or "witten_bell".
  std::vector<std::string> smoothing_used;
  /// Per order: the three modified Kneser-Ney discounts (zeros under
  /// Witten-Bell).
  std::vector<std::array<double, 3>> discounts;
};

/// Interpolated modified Kneser-Ney (default) or Witten-Bell, converted to
/// back-off form. An order whose count-of-counts has an empty bucket among
/// n1..n4 falls back to Witten-Bell. Throws kEmptyCorpus, kOrderOutOfRange.
ArpaLm TrainArpa(const std::vector<std::string>& sentences,
                 const LmTrainOptions& options, LmTrainInfo* info = nullptr);

/// 10^(-sum logprob / token count), with one </s> token per sentence.
/// Throws kEmptyCorpus.
double Perplexity(const ArpaLm& lm, const std::vector<std::string>& sentences);

}  // namespace nerkit

#endif  // NERKIT_NGRAM_LM_H_
