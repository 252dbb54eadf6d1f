// src/ctc_decoder.cc

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

#include "nerkit/ctc_decoder.h"

#include <omp.h>

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_map>

#include "nerkit/error.h"
#include "nerkit/text_util.h"

namespace nerkit {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::string_view kBinaryMagic = "NKPOST01";

double LogAdd(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  if (a < b) std::swap(a, b);
  return a + std::log1p(std::exp(b - a));
}

}  // namespace

PosteriorMatrix::PosteriorMatrix(int frames, std::string symbols, int blank,
                                 std::vector<double> probs)
    : frames_(frames),
      symbols_(std::move(symbols)),
      blank_(blank),
      probs_(std::move(probs)) {
  const int v = num_symbols();
  if (frames_ < 1) {
    throw Error(ErrorKind::kInvalidPosteriors, "need at least one frame");
  }
  if (v < 1 || blank_ < 0 || blank_ >= v) {
    throw Error(ErrorKind::kInvalidPosteriors, "blank index out of range");
  }
  if (probs_.size() != static_cast<size_t>(frames_) * v) {
    throw Error(ErrorKind::kInvalidPosteriors,
                "expected " + std::to_string(frames_ * v) + " values, got " +
                    std::to_string(probs_.size()));
  }
  for (int a = 0; a < v; ++a) {
    if (a == blank_) continue;
    for (int b = a + 1; b < v; ++b) {
      if (b != blank_ && symbols_[a] == symbols_[b]) {
        throw Error(ErrorKind::kInvalidPosteriors,
                    std::string("duplicate symbol '") + symbols_[a] + "'");
      }
    }
  }
  log_probs_.resize(probs_.size());
  for (int t = 0; t < frames_; ++t) {
    double sum = 0.0;
    for (int k = 0; k < v; ++k) {
      double p = probs_[t * v + k];
      if (!(p >= 0.0 && p <= 1.0)) {
        throw Error(ErrorKind::kInvalidPosteriors,
                    "value outside [0,1] at frame " + std::to_string(t));
      }
      sum += p;
      log_probs_[t * v + k] = p > 0.0 ? std::log(p) : kNegInf;
    }
    if (std::abs(sum - 1.0) > 1e-5) {
      throw Error(ErrorKind::kInvalidPosteriors,
                  "row " + std::to_string(t) + " sums to " + FormatDouble(sum));
    }
  }
}

int PosteriorMatrix::IndexOf(char c) const {
  for (int k = 0; k < num_symbols(); ++k) {
    if (k != blank_ && symbols_[k] == c) return k;
  }
  return -1;
}

// ---------------------------------------------------------------------------
// I/O

PosteriorMatrix ParsePosteriorText(std::string_view contents) {
  std::istringstream in{std::string(contents)};
  std::string line;
  int frames = -1, nsym = -1, blank = -1;
  std::string symbols;
  bool have_alphabet = false;
  std::vector<double> values;
  while (std::getline(in, line)) {
    std::string_view t = Trim(line);
    if (t.empty() || t.front() == '#') continue;
    auto fields = SplitWords(t);
    if (fields[0] == "frames" && fields.size() == 2) {
      frames = std::stoi(fields[1]);
    } else if (fields[0] == "symbols" && fields.size() == 2) {
      nsym = std::stoi(fields[1]);
    } else if (fields[0] == "alphabet") {
      for (size_t k = 1; k < fields.size(); ++k) {
        const std::string& tok = fields[k];
        if (tok == "<blank>") {
          if (blank >= 0) {
            throw Error(ErrorKind::kInvalidPosteriors, "two <blank> markers");
          }
          blank = static_cast<int>(symbols.size());
          symbols.push_back('\0');
        } else if (tok == "<space>") {
          symbols.push_back(' ');
        } else if (tok.size() == 1) {
          symbols.push_back(tok[0]);
        } else {
          throw Error(ErrorKind::kInvalidPosteriors,
                      "alphabet token '" + tok + "' is not one character");
        }
      }
      have_alphabet = true;
    } else {
      for (const std::string& f : fields) {
        double v = 0.0;
        auto res = std::from_chars(f.data(), f.data() + f.size(), v);
        if (res.ec != std::errc() || res.ptr != f.data() + f.size()) {
          throw Error(ErrorKind::kInvalidPosteriors, "bad number '" + f + "'");
        }
        values.push_back(v);
      }
    }
  }
  if (frames < 0 || nsym < 0 || !have_alphabet) {
    throw Error(ErrorKind::kInvalidPosteriors,
                "missing frames/symbols/alphabet header");
  }
  if (blank < 0) throw Error(ErrorKind::kInvalidPosteriors, "no <blank> marker");
  if (static_cast<int>(symbols.size()) != nsym) {
    throw Error(ErrorKind::kInvalidPosteriors,
                "alphabet has " + std::to_string(symbols.size()) +
                    " symbols, header says " + std::to_string(nsym));
  }
  return PosteriorMatrix(frames, std::move(symbols), blank, std::move(values));
}

std::string PosteriorToText(const PosteriorMatrix& post) {
  std::string out = "frames " + std::to_string(post.frames()) + "\nsymbols " +
                    std::to_string(post.num_symbols()) + "\nalphabet";
  for (int k = 0; k < post.num_symbols(); ++k) {
    out += ' ';
    if (k == post.blank()) {
      out += "<blank>";
    } else if (post.symbol(k) == ' ') {
      out += "<space>";
    } else {
      out += post.symbol(k);
    }
  }
  out += '\n';
  for (int t = 0; t < post.frames(); ++t) {
    for (int k = 0; k < post.num_symbols(); ++k) {
      if (k > 0) out += ' ';
      out += FormatDouble(post.prob(t, k));
    }
    out += '\n';
  }
  return out;
}

namespace {

void PutU32(std::string* out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out->push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

uint32_t GetU32(std::string_view bytes, size_t pos) {
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v |= static_cast<uint32_t>(static_cast<unsigned char>(bytes[pos + i])) << (8 * i);
  }
  return v;
}

std::string Slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string PosteriorToBinary(const PosteriorMatrix& post) {
  std::string out(kBinaryMagic);
  PutU32(&out, static_cast<uint32_t>(post.frames()));
  PutU32(&out, static_cast<uint32_t>(post.num_symbols()));
  PutU32(&out, static_cast<uint32_t>(post.blank()));
  out += post.symbols();
  for (double p : post.probs()) {
    PutU32(&out, std::bit_cast<uint32_t>(static_cast<float>(p)));
  }
  return out;
}

PosteriorMatrix ParsePosteriorBinary(std::string_view bytes) {
  const size_t header = kBinaryMagic.size() + 12;
  if (bytes.size() < header || bytes.substr(0, kBinaryMagic.size()) != kBinaryMagic) {
    throw Error(ErrorKind::kInvalidPosteriors, "bad binary posterior header");
  }
  uint32_t frames = GetU32(bytes, 8), nsym = GetU32(bytes, 12),
           blank = GetU32(bytes, 16);
  size_t need = header + nsym + static_cast<size_t>(frames) * nsym * 4;
  if (bytes.size() != need) {
    throw Error(ErrorKind::kInvalidPosteriors,
                "binary posterior size mismatch: expected " +
                    std::to_string(need) + " bytes");
  }
  std::string symbols(bytes.substr(header, nsym));
  std::vector<double> probs(static_cast<size_t>(frames) * nsym);
  size_t pos = header + nsym;
  for (double& p : probs) {
    p = static_cast<double>(std::bit_cast<float>(GetU32(bytes, pos)));
    pos += 4;
  }
  return PosteriorMatrix(static_cast<int>(frames), std::move(symbols),
                         static_cast<int>(blank), std::move(probs));
}

PosteriorMatrix ReadPosteriorText(const std::string& path) {
  return ParsePosteriorText(Slurp(path));
}

PosteriorMatrix ReadPosteriorBinary(const std::string& path) {
  return ParsePosteriorBinary(Slurp(path));
}

PosteriorMatrix ReadPosteriors(const std::string& path) {
  std::string bytes = Slurp(path);
  if (bytes.compare(0, kBinaryMagic.size(), kBinaryMagic) == 0) {
    return ParsePosteriorBinary(bytes);
  }
  return ParsePosteriorText(bytes);
}

// ---------------------------------------------------------------------------
// Decoding

std::string GreedyDecode(const PosteriorMatrix& post) {
  std::string out;
  int prev = -1;
  for (int t = 0; t < post.frames(); ++t) {
    int best = 0;
    for (int k = 1; k < post.num_symbols(); ++k) {
      if (post.prob(t, k) > post.prob(t, best)) best = k;
    }
    if (best != prev && best != post.blank()) out.push_back(post.symbol(best));
    prev = best;
  }
  return out;
}

double CtcLabelSeqProb(const PosteriorMatrix& post, std::string_view labels) {
  const int len = static_cast<int>(labels.size());
  if (len > post.frames()) {
    throw Error(ErrorKind::kSequenceLongerThanFrames,
                std::to_string(len) + " labels for " +
                    std::to_string(post.frames()) + " frames");
  }
  // Blank-interleaved sequence: b l1 b l2 ... lL b.
  std::vector<int> ext(2 * len + 1, post.blank());
  for (int i = 0; i < len; ++i) {
    int k = post.IndexOf(labels[i]);
    if (k < 0) {
      throw Error(ErrorKind::kInvalidAlphabet,
                  std::string("symbol '") + labels[i] + "' not in alphabet");
    }
    ext[2 * i + 1] = k;
  }
  const int s_len = static_cast<int>(ext.size());
  std::vector<double> alpha(s_len, kNegInf), next(s_len);
  alpha[0] = post.log_prob(0, ext[0]);
  if (s_len > 1) alpha[1] = post.log_prob(0, ext[1]);
  for (int t = 1; t < post.frames(); ++t) {
    for (int s = 0; s < s_len; ++s) {
      double a = alpha[s];
      if (s >= 1) a = LogAdd(a, alpha[s - 1]);
      if (s >= 2 && ext[s] != post.blank() && ext[s] != ext[s - 2]) {
        a = LogAdd(a, alpha[s - 2]);
      }
      next[s] = a == kNegInf ? kNegInf : a + post.log_prob(t, ext[s]);
    }
    std::swap(alpha, next);
  }
  double total = alpha[s_len - 1];
  if (s_len > 1) total = LogAdd(total, alpha[s_len - 2]);
  return std::exp(total);
}

std::vector<std::string> LmWords(std::string_view text, const TagMap* tagmap) {
  std::vector<std::string> words;
  std::string cur;
  for (char c : text) {
    if (c == ' ') {
      if (!cur.empty()) words.push_back(std::move(cur));
      cur.clear();
    } else if (tagmap != nullptr && tagmap->IsTagChar(c)) {
      if (!cur.empty()) words.push_back(std::move(cur));
      cur.clear();
      words.emplace_back(1, c);
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) words.push_back(std::move(cur));
  return words;
}

namespace {

struct Prefix {
  std::string text;
  int last = -1;  // last emitted symbol, -1 when empty
  double p_blank = kNegInf;
  double p_nonblank = kNegInf;
  // Word-level state; a function of `text` alone.
  std::vector<WordId> history;
  std::string pending;  // characters of the unfinished word
  double lm = 0.0;      // log10 LM probability of completed words
  int words = 0;
};

class PrefixScorer {
 public:
  explicit PrefixScorer(const BeamOptions& options) : opt_(options) {}

  void CompleteWord(Prefix* p, const std::string& word) const {
    ++p->words;
    if (opt_.lm == nullptr) return;
    WordId id = opt_.lm->ScoringId(word);
    p->lm += opt_.lm->Score(p->history, id);
    p->history.push_back(id);
    size_t keep = static_cast<size_t>(std::max(1, opt_.lm->order() - 1));
    if (p->history.size() > keep) {
      p->history.erase(p->history.begin(),
                       p->history.end() - static_cast<long>(keep));
    }
  }

  /// Word bookkeeping for `p` extended by character c.
  void Extend(Prefix* p, char c) const {
    p->text.push_back(c);
    if (c == ' ') {
      FlushPending(p);
    } else if (opt_.tagmap != nullptr && opt_.tagmap->IsTagChar(c)) {
      FlushPending(p);
      CompleteWord(p, std::string(1, c));
    } else {
      p->pending.push_back(c);
    }
  }

  void FlushPending(Prefix* p) const {
    if (p->pending.empty()) return;
    std::string word = std::move(p->pending);
    p->pending.clear();
    CompleteWord(p, word);
  }

  double Combined(double acoustic, double lm, int words) const {
    double score = acoustic;
    if (opt_.alpha != 0.0) score += opt_.alpha * lm;
    if (opt_.beta != 0.0) score += opt_.beta * words;
    return score;
  }

  double Combined(const Prefix& p) const {
    return Combined(LogAdd(p.p_blank, p.p_nonblank), p.lm, p.words);
  }

 private:
  const BeamOptions& opt_;
};

bool BetterScore(double sa, const std::string& ta, double sb,
                 const std::string& tb) {
  if (sa != sb) return sa > sb;
  return ta < tb;
}

}  // namespace

std::vector<BeamResult> BeamDecode(const PosteriorMatrix& post,
                                   const BeamOptions& options) {
  if (options.beam_width < 1) {
    throw Error(ErrorKind::kBeamWidthZero, "beam width must be >= 1");
  }
  if (options.lm != nullptr && post.IndexOf(' ') < 0) {
    throw Error(ErrorKind::kInvalidAlphabet,
                "LM fusion needs a space symbol in the alphabet");
  }
  PrefixScorer scorer(options);
  const int num_sym = post.num_symbols();
  const int blank = post.blank();

  std::vector<Prefix> beam(1);
  beam[0].p_blank = 0.0;
  if (options.lm != nullptr) beam[0].history = {Vocabulary::kBosId};

  std::vector<Prefix> next;
  std::unordered_map<std::string, size_t> index;
  for (int t = 0; t < post.frames(); ++t) {
    next.clear();
    index.clear();
    auto slot = [&](const Prefix& parent, int sym) -> Prefix& {
      std::string key = parent.text;
      if (sym >= 0) key.push_back(post.symbol(sym));
      auto it = index.find(key);
      if (it != index.end()) return next[it->second];
      Prefix p = parent;
      p.p_blank = p.p_nonblank = kNegInf;
      if (sym >= 0) {
        scorer.Extend(&p, post.symbol(sym));
        p.last = sym;
      }
      index.emplace(std::move(key), next.size());
      next.push_back(std::move(p));
      return next.back();
    };

    const double lp_blank = post.log_prob(t, blank);
    for (const Prefix& p : beam) {
      const double total = LogAdd(p.p_blank, p.p_nonblank);
      {
        Prefix& same = slot(p, -1);
        if (lp_blank != kNegInf) {
          same.p_blank = LogAdd(same.p_blank, total + lp_blank);
        }
        if (p.last >= 0 && post.log_prob(t, p.last) != kNegInf) {
          same.p_nonblank =
              LogAdd(same.p_nonblank, p.p_nonblank + post.log_prob(t, p.last));
        }
      }
      for (int k = 0; k < num_sym; ++k) {
        if (k == blank) continue;
        const double lp = post.log_prob(t, k);
        if (lp == kNegInf) continue;
        Prefix& ext = slot(p, k);
        const double from = k == p.last ? p.p_blank : total;
        if (from != kNegInf) ext.p_nonblank = LogAdd(ext.p_nonblank, from + lp);
      }
    }

    // Drop prefixes that received no probability mass this frame.
    std::erase_if(next, [](const Prefix& p) {
      return p.p_blank == kNegInf && p.p_nonblank == kNegInf;
    });
    std::vector<double> score(next.size());
    for (size_t i = 0; i < next.size(); ++i) score[i] = scorer.Combined(next[i]);
    std::vector<size_t> order(next.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    size_t keep = std::min(order.size(), static_cast<size_t>(options.beam_width));
    auto cmp = [&](size_t a, size_t b) {
      return BetterScore(score[a], next[a].text, score[b], next[b].text);
    };
    std::partial_sort(order.begin(), order.begin() + keep, order.end(), cmp);
    beam.clear();
    for (size_t i = 0; i < keep; ++i) beam.push_back(std::move(next[order[i]]));
  }

  std::vector<BeamResult> results;
  results.reserve(beam.size());
  for (Prefix& p : beam) {
    scorer.FlushPending(&p);
    if (options.lm != nullptr) {
      p.lm += options.lm->Score(p.history, Vocabulary::kEosId);
    }
    BeamResult r;
    r.text = p.text;
    r.acoustic = LogAdd(p.p_blank, p.p_nonblank);
    r.lm_score = p.lm;
    r.word_count = p.words;
    r.score = scorer.Combined(r.acoustic, r.lm_score, r.word_count);
    results.push_back(std::move(r));
  }
  std::sort(results.begin(), results.end(),
            [](const BeamResult& a, const BeamResult& b) {
              return BetterScore(a.score, a.text, b.score, b.text);
            });
  if (options.n_best > 0 && results.size() > static_cast<size_t>(options.n_best)) {
    results.resize(options.n_best);
  }
  return results;
}

std::vector<std::vector<BeamResult>> BeamDecodeBatchSerial(
    const std::vector<PosteriorMatrix>& batch, const BeamOptions& options) {
  std::vector<std::vector<BeamResult>> out;
  out.reserve(batch.size());
  for (const PosteriorMatrix& post : batch) out.push_back(BeamDecode(post, options));
  return out;
}

std::vector<std::vector<BeamResult>> BeamDecodeBatch(
    const std::vector<PosteriorMatrix>& batch, const BeamOptions& options,
    int jobs) {
  std::vector<std::vector<BeamResult>> out(batch.size());
  const long long n = static_cast<long long>(batch.size());
  // Exceptions may not leave an OpenMP region; the first one is rethrown.
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic) num_threads(jobs > 0 ? jobs : omp_get_max_threads())
  for (long long i = 0; i < n; ++i) {
    try {
      out[i] = BeamDecode(batch[i], options);
    } catch (...) {
#pragma omp critical(nerkit_decode_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace nerkit
