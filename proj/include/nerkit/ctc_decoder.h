// nerkit/ctc_decoder.h

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

#ifndef NERKIT_CTC_DECODER_H_
#define NERKIT_CTC_DECODER_H_

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nerkit/ngram_lm.h"
#include "nerkit/tagformat.h"

namespace nerkit {

/// Frame-level symbol posteriors. Each symbol is one byte; the blank slot's
/// byte is ignored.
class PosteriorMatrix {
 public:
  /// `probs` is row-major T x V. Validates shape, range [0,1] and row sums
  /// (1 +/- 1e-5); throws kInvalidPosteriors.
  PosteriorMatrix(int frames, std::string symbols, int blank,
                  std::vector<double> probs);

  int frames() const { return frames_; }
  int num_symbols() const { return static_cast<int>(symbols_.size()); }
  int blank() const { return blank_; }
  const std::string& symbols() const { return symbols_; }
  char symbol(int v) const { return symbols_[v]; }
  /// Index of a non-blank symbol character, or -1.
  int IndexOf(char c) const;

  double prob(int t, int v) const { return probs_[t * num_symbols() + v]; }
  double log_prob(int t, int v) const { return log_probs_[t * num_symbols() + v]; }
  const std::vector<double>& probs() const { return probs_; }

 private:
  int frames_;
  std::string symbols_;
  int blank_;
  std::vector<double> probs_;
  std::vector<double> log_probs_;
};

/// Text format:
///   frames T
///   symbols V
///   alphabet tok_0 ... tok_{V-1}
///   T rows of V numbers
/// Alphabet tokens are single characters, `<blank>` (exactly once) or
/// `<space>`. Lines starting with `#` are comments.
PosteriorMatrix ReadPosteriorText(const std::string& path);
PosteriorMatrix ParsePosteriorText(std::string_view contents);
std::string PosteriorToText(const PosteriorMatrix& post);

/// Binary format, little-endian: "NKPOST01", uint32 T, uint32 V,
/// uint32 blank, V symbol bytes, T*V float32 row-major.
PosteriorMatrix ReadPosteriorBinary(const std::string& path);
PosteriorMatrix ParsePosteriorBinary(std::string_view bytes);
std::string PosteriorToBinary(const PosteriorMatrix& post);

/// Picks the format from the file's magic bytes.
PosteriorMatrix ReadPosteriors(const std::string& path);

/// Best path: per-frame argmax (lowest index on ties), collapse repeats,
/// drop blanks.
std::string GreedyDecode(const PosteriorMatrix& post);

/// Probability that the network emits `labels` (blank excluded) summed over
/// all CTC alignments. Throws kSequenceLongerThanFrames when
/// labels.size() > T, kInvalidAlphabet for characters not in the alphabet.
double CtcLabelSeqProb(const PosteriorMatrix& post, std::string_view labels);

struct BeamOptions {
  int beam_width = 500;
  double alpha = 1.0;  // weight on log10 LM probability
  double beta = 0.5;   // per-word insertion bonus
  int n_best = 1;
  const ArpaLm* lm = nullptr;
  /// When set, tag characters are word boundaries and standalone LM words.
  const TagMap* tagmap = nullptr;
};

struct BeamResult {
  std::string text;
  double score = 0.0;          // combined score
  double acoustic = 0.0;       // natural-log CTC prefix probability
  double lm_score = 0.0;       // accumulated log10 LM probability
  int word_count = 0;
};

/// Prefix beam search keeping (blank, non-blank) path scores per prefix.
/// combined = logaddexp(p_blank, p_nonblank) + alpha * lm + beta * words,
/// where lm includes the end-of-sentence term for final hypotheses.
/// Results are sorted by combined score, ties by text. Throws
/// kBeamWidthZero, kInvalidAlphabet (LM without a space symbol).
std::vector<BeamResult> BeamDecode(const PosteriorMatrix& post,
                                   const BeamOptions& options);

/// Decodes a batch in parallel (OpenMP); results are identical to the
/// serial loop and independent of the thread count.
std::vector<std::vector<BeamResult>> BeamDecodeBatch(
    const std::vector<PosteriorMatrix>& batch, const BeamOptions& options,
    int jobs = 0);
std::vector<std::vector<BeamResult>> BeamDecodeBatchSerial(
    const std::vector<PosteriorMatrix>& batch, const BeamOptions& options);

/// Splits decoder output into LM words: spaces separate words and, with a
/// tag map, each tag character is a word of its own.
std::vector<std::string> LmWords(std::string_view text, const TagMap* tagmap);

}  // namespace nerkit

#endif  // NERKIT_CTC_DECODER_H_
