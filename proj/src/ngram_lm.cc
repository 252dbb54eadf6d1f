// src/ngram_lm.cc

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

#include "nerkit/ngram_lm.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "nerkit/error.h"
#include "nerkit/text_util.h"

namespace nerkit {

Vocabulary::Vocabulary() {
  Intern(kBos);
  Intern(kEos);
  Intern(kUnk);
}

WordId Vocabulary::Intern(std::string_view word) {
  auto it = index_.find(std::string(word));
  if (it != index_.end()) return it->second;
  WordId id = static_cast<WordId>(words_.size());
  words_.emplace_back(word);
  index_.emplace(words_.back(), id);
  return id;
}

WordId Vocabulary::Find(std::string_view word) const {
  auto it = index_.find(std::string(word));
  return it == index_.end() ? kNotFound : it->second;
}

NgramCounts::NgramCounts(int order) : tables_(order) {}

void NgramCounts::AddSentence(std::span<const WordId> ids) {
  std::vector<WordId> tokens;
  tokens.reserve(ids.size() + 2);
  tokens.push_back(Vocabulary::kBosId);
  tokens.insert(tokens.end(), ids.begin(), ids.end());
  tokens.push_back(Vocabulary::kEosId);
  std::vector<WordId> key;
  for (int n = 1; n <= order(); ++n) {
    for (size_t i = 0; i + n <= tokens.size(); ++i) {
      key.assign(tokens.begin() + i, tokens.begin() + i + n);
      ++tables_[n - 1][key];
    }
  }
}

void NgramCounts::Merge(const NgramCounts& other) {
  for (int n = 1; n <= std::min(order(), other.order()); ++n) {
    for (const auto& [key, c] : other.table(n)) tables_[n - 1][key] += c;
  }
}

long long NgramCounts::Get(const std::vector<WordId>& ngram) const {
  if (ngram.empty() || static_cast<int>(ngram.size()) > order()) return 0;
  const Table& t = tables_[ngram.size() - 1];
  auto it = t.find(ngram);
  return it == t.end() ? 0 : it->second;
}

std::vector<std::vector<WordId>> InternCorpus(
    const std::vector<std::string>& sentences, Vocabulary* vocab) {
  std::vector<std::vector<WordId>> corpus;
  corpus.reserve(sentences.size());
  for (const std::string& s : sentences) {
    std::vector<WordId> ids;
    for (const std::string& w : SplitWords(s)) {
      if (w == kBos || w == kEos) continue;
      ids.push_back(vocab->Intern(w));
    }
    corpus.push_back(std::move(ids));
  }
  return corpus;
}

NgramCounts CountNgramsSerial(const std::vector<std::vector<WordId>>& corpus,
                              int order) {
  NgramCounts counts(order);
  for (const auto& s : corpus) counts.AddSentence(s);
  return counts;
}

NgramCounts CountNgrams(const std::vector<std::vector<WordId>>& corpus,
                        int order, int jobs) {
#ifdef _OPENMP
  int shards = jobs > 0 ? jobs : omp_get_max_threads();
#else
  int shards = 1;
  (void)jobs;
#endif
  shards = std::max(1, std::min<int>(shards, static_cast<int>(corpus.size())));
  if (shards == 1) return CountNgramsSerial(corpus, order);

  std::vector<NgramCounts> partial(shards, NgramCounts(order));
  const long long n = static_cast<long long>(corpus.size());
#pragma omp parallel for num_threads(shards) schedule(static, 1)
  for (int s = 0; s < shards; ++s) {
    long long begin = n * s / shards, end = n * (s + 1) / shards;
    for (long long i = begin; i < end; ++i) partial[s].AddSentence(corpus[i]);
  }
  NgramCounts merged = std::move(partial[0]);
  for (int s = 1; s < shards; ++s) merged.Merge(partial[s]);
  return merged;
}

// ---------------------------------------------------------------------------
// ArpaLm

ArpaLm::ArpaLm(Vocabulary vocab, std::vector<Table> tables)
    : vocab_(std::move(vocab)), tables_(std::move(tables)) {}

const ArpaLm::Entry* ArpaLm::Find(const std::vector<WordId>& ngram) const {
  if (ngram.empty() || static_cast<int>(ngram.size()) > order()) return nullptr;
  const Table& t = tables_[ngram.size() - 1];
  auto it = t.find(ngram);
  return it == t.end() ? nullptr : &it->second;
}

bool ArpaLm::has_unk() const {
  return !tables_.empty() && tables_[0].count({Vocabulary::kUnkId}) > 0;
}

WordId ArpaLm::ScoringId(std::string_view word) const {
  WordId id = vocab_.Find(word);
  if (id != Vocabulary::kNotFound && Find({id}) != nullptr) return id;
  return has_unk() ? Vocabulary::kUnkId : Vocabulary::kNotFound;
}

double ArpaLm::Score(std::span<const WordId> history, WordId word) const {
  if (word == Vocabulary::kNotFound || tables_.empty()) {
    return -std::numeric_limits<double>::infinity();
  }
  size_t ctx = std::min(history.size(), static_cast<size_t>(order() - 1));
  double backoff = 0.0;
  std::vector<WordId> key;
  for (;; --ctx) {
    key.assign(history.end() - ctx, history.end());
    key.push_back(word);
    if (const Entry* e = Find(key)) return backoff + e->logprob;
    if (ctx == 0) break;
    key.pop_back();
    if (const Entry* h = Find(key)) backoff += h->backoff;
  }
  return -std::numeric_limits<double>::infinity();
}

std::vector<WordId> ArpaLm::PredictableWords() const {
  std::vector<WordId> words;
  if (tables_.empty()) return words;
  for (const auto& [key, e] : tables_[0]) {
    if (key[0] != Vocabulary::kBosId) words.push_back(key[0]);
  }
  std::sort(words.begin(), words.end());
  return words;
}

double ArpaLm::LogProb(std::span<const std::string> words) const {
  std::vector<WordId> history{Vocabulary::kBosId};
  double total = 0.0;
  for (const std::string& w : words) {
    WordId id = ScoringId(w);
    total += Score(history, id);
    history.push_back(id);
  }
  total += Score(history, Vocabulary::kEosId);
  return total;
}

double ArpaLm::LogProb(std::string_view sentence) const {
  auto words = SplitWords(sentence);
  return LogProb(words);
}

namespace {

double ParseNumber(std::string_view s, int lineno) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw Error(ErrorKind::kInvalidArpa, "line " + std::to_string(lineno) +
                                             ": bad number '" + std::string(s) +
                                             "'");
  }
  return v;
}

}  // namespace

ArpaLm ArpaLm::ParseArpa(std::string_view contents) {
  std::istringstream in{std::string(contents)};
  std::string line;
  int lineno = 0;
  std::vector<long long> declared;
  enum class State { kPreamble, kData, kSection, kEnd } state = State::kPreamble;
  int section = 0;
  Vocabulary vocab;
  std::vector<Table> tables;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view t = Trim(line);
    if (t.empty()) continue;
    if (t == "\\data\\") {
      state = State::kData;
      continue;
    }
    if (t == "\\end\\") {
      state = State::kEnd;
      break;
    }
    if (t.front() == '\\') {
      // "\N-grams:"
      int n = 0;
      auto res = std::from_chars(t.data() + 1, t.data() + t.size(), n);
      if (res.ec != std::errc() || std::string_view(res.ptr) != "-grams:" ||
          n < 1 || n > static_cast<int>(declared.size())) {
        throw Error(ErrorKind::kInvalidArpa,
                    "line " + std::to_string(lineno) + ": bad section header");
      }
      section = n;
      state = State::kSection;
      continue;
    }
    if (state == State::kData) {
      if (t.substr(0, 6) != "ngram ") continue;
      auto eq = t.find('=');
      if (eq == std::string_view::npos) {
        throw Error(ErrorKind::kInvalidArpa,
                    "line " + std::to_string(lineno) + ": bad count line");
      }
      int n = static_cast<int>(ParseNumber(Trim(t.substr(6, eq - 6)), lineno));
      long long c = static_cast<long long>(ParseNumber(Trim(t.substr(eq + 1)), lineno));
      if (n != static_cast<int>(declared.size()) + 1) {
        throw Error(ErrorKind::kInvalidArpa, "n-gram counts out of order");
      }
      declared.push_back(c);
      tables.resize(declared.size());
      continue;
    }
    if (state != State::kSection) continue;
    auto fields = SplitWords(t);
    if (fields.size() != static_cast<size_t>(section) + 1 &&
        fields.size() != static_cast<size_t>(section) + 2) {
      throw Error(ErrorKind::kInvalidArpa,
                  "line " + std::to_string(lineno) + ": expected " +
                      std::to_string(section) + " words");
    }
    Entry e;
    e.logprob = ParseNumber(fields[0], lineno);
    std::vector<WordId> key;
    for (int k = 0; k < section; ++k) key.push_back(vocab.Intern(fields[1 + k]));
    if (fields.size() == static_cast<size_t>(section) + 2) {
      e.backoff = ParseNumber(fields.back(), lineno);
      e.has_backoff = true;
    }
    tables[section - 1][key] = e;
  }
  if (state != State::kEnd) {
    throw Error(ErrorKind::kInvalidArpa, "missing \\end\\ marker");
  }
  if (declared.empty()) throw Error(ErrorKind::kInvalidArpa, "no \\data\\ counts");
  for (size_t n = 0; n < declared.size(); ++n) {
    if (static_cast<long long>(tables[n].size()) != declared[n]) {
      throw Error(ErrorKind::kInvalidArpa,
                  std::to_string(n + 1) + "-gram count mismatch: declared " +
                      std::to_string(declared[n]) + ", found " +
                      std::to_string(tables[n].size()));
    }
  }
  return ArpaLm(std::move(vocab), std::move(tables));
}

ArpaLm ArpaLm::Read(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open ARPA file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ParseArpa(ss.str());
}

std::string ArpaLm::ToArpa() const {
  std::string out = "\n\\data\\\n";
  for (int n = 1; n <= order(); ++n) {
    out += "ngram " + std::to_string(n) + "=" +
           std::to_string(tables_[n - 1].size()) + "\n";
  }
  for (int n = 1; n <= order(); ++n) {
    out += "\n\\" + std::to_string(n) + "-grams:\n";
    std::vector<std::pair<std::string, const Entry*>> rows;
    rows.reserve(tables_[n - 1].size());
    for (const auto& [key, e] : tables_[n - 1]) {
      std::string words;
      for (size_t k = 0; k < key.size(); ++k) {
        if (k > 0) words += ' ';
        words += vocab_.Word(key[k]);
      }
      rows.emplace_back(std::move(words), &e);
    }
    std::sort(rows.begin(), rows.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [words, e] : rows) {
      out += FormatDouble(e->logprob) + '\t' + words;
      if (e->has_backoff) out += '\t' + FormatDouble(e->backoff);
      out += '\n';
    }
  }
  out += "\n\\end\\\n";
  return out;
}

void ArpaLm::Write(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write ARPA file " + path);
  out << ToArpa();
  if (!out) throw Error(ErrorKind::kIo, "write failed for " + path);
}

// ---------------------------------------------------------------------------
// Training

namespace {

using Key = std::vector<WordId>;
using CountTable = NgramCounts::Table;

struct HistoryStats {
  long long total = 0;
  long long distinct = 0;
  long long n1 = 0, n2 = 0, n3plus = 0;
};

struct OrderSmoothing {
  bool kneser_ney = false;
  std::array<double, 3> discount{};  // for counts 1, 2, 3+

  double Discount(long long c) const {
    if (!kneser_ney || c <= 0) return 0.0;
    return discount[std::min<long long>(c, 3) - 1];
  }
};

OrderSmoothing ChooseSmoothing(const CountTable& counts, bool want_kn) {
  OrderSmoothing s;
  if (!want_kn) return s;
  std::array<long long, 5> cc{};
  for (const auto& [key, c] : counts) {
    if (c >= 1 && c <= 4) ++cc[c];
  }
  if (cc[1] == 0 || cc[2] == 0 || cc[3] == 0 || cc[4] == 0) return s;
  double y = static_cast<double>(cc[1]) / (cc[1] + 2.0 * cc[2]);
  double d1 = 1.0 - 2.0 * y * cc[2] / cc[1];
  double d2 = 2.0 - 3.0 * y * cc[3] / cc[2];
  double d3 = 3.0 - 4.0 * y * cc[4] / cc[3];
  if (!(d1 > 0.0 && d1 <= 1.0 && d2 > 0.0 && d2 <= 2.0 && d3 > 0.0 &&
        d3 <= 3.0)) {
    return s;
  }
  s.kneser_ney = true;
  s.discount = {d1, d2, d3};
  return s;
}

// Interpolation weight given to the lower order for one history.
double LowerOrderWeight(const HistoryStats& h, const OrderSmoothing& s) {
  if (s.kneser_ney) {
    return (s.discount[0] * h.n1 + s.discount[1] * h.n2 +
            s.discount[2] * h.n3plus) /
           static_cast<double>(h.total);
  }
  return static_cast<double>(h.distinct) /
         static_cast<double>(h.total + h.distinct);
}

double DiscountedMass(long long c, const HistoryStats& h,
                      const OrderSmoothing& s) {
  if (s.kneser_ney) {
    return (static_cast<double>(c) - s.Discount(c)) /
           static_cast<double>(h.total);
  }
  return static_cast<double>(c) / static_cast<double>(h.total + h.distinct);
}

}  // namespace

ArpaLm TrainArpa(const std::vector<std::string>& sentences,
                 const LmTrainOptions& options, LmTrainInfo* info) {
  const int order = options.order;
  if (order < 1 || order > 5) {
    throw Error(ErrorKind::kOrderOutOfRange,
                "order " + std::to_string(order) + " not in 1..5");
  }
  if (sentences.empty()) throw Error(ErrorKind::kEmptyCorpus, "no sentences");

  Vocabulary vocab;
  auto corpus = InternCorpus(sentences, &vocab);
  NgramCounts counts = CountNgrams(corpus, order, options.jobs);
  const bool kn = options.smoothing == Smoothing::kKneserNey;

  // Kneser-Ney replaces lower-order counts by the number of distinct left
  // extensions, except for n-grams starting at <s>, which have none.
  std::vector<CountTable> adjusted(order);
  adjusted[order - 1] = counts.table(order);
  for (int n = order - 1; n >= 1; --n) {
    if (!kn) {
      adjusted[n - 1] = counts.table(n);
      continue;
    }
    CountTable& a = adjusted[n - 1];
    for (const auto& [key, c] : counts.table(n)) {
      if (key[0] == Vocabulary::kBosId) a[key] = c;
    }
    for (const auto& [key, c] : counts.table(n + 1)) {
      ++a[Key(key.begin() + 1, key.end())];
    }
  }
  adjusted[0].erase(Key{Vocabulary::kBosId});

  if (info) {
    info->smoothing_used.clear();
    info->discounts.clear();
  }

  std::vector<ArpaLm::Table> tables(order);

  // Predictable vocabulary for the uniform base distribution.
  std::vector<WordId> predictable;
  for (WordId id = 0; id < vocab.size(); ++id) {
    if (id == Vocabulary::kBosId) continue;
    if (id == Vocabulary::kUnkId && options.closed_vocabulary &&
        adjusted[0].count(Key{id}) == 0) {
      continue;
    }
    predictable.push_back(id);
  }
  const double uniform = 1.0 / static_cast<double>(predictable.size());

  // Probabilities (not logs) of the interpolated model, per order.
  std::vector<std::unordered_map<Key, double, WordIdsHash>> prob(order);

  for (int n = 1; n <= order; ++n) {
    const CountTable& a = adjusted[n - 1];
    OrderSmoothing smoothing = ChooseSmoothing(a, kn);
    if (info) {
      info->smoothing_used.push_back(smoothing.kneser_ney ? "modified_kneser_ney"
                                                          : "witten_bell");
      info->discounts.push_back(smoothing.kneser_ney
                                    ? smoothing.discount
                                    : std::array<double, 3>{0.0, 0.0, 0.0});
    }

    std::unordered_map<Key, HistoryStats, WordIdsHash> hist;
    for (const auto& [key, c] : a) {
      HistoryStats& h = hist[Key(key.begin(), key.end() - 1)];
      h.total += c;
      ++h.distinct;
      if (c == 1) ++h.n1;
      else if (c == 2) ++h.n2;
      else ++h.n3plus;
    }

    auto& p = prob[n - 1];
    if (n == 1) {
      const HistoryStats& h = hist[Key{}];
      double gamma = LowerOrderWeight(h, smoothing);
      for (WordId w : predictable) {
        auto it = a.find(Key{w});
        long long c = it == a.end() ? 0 : it->second;
        p[Key{w}] = (c > 0 ? DiscountedMass(c, h, smoothing) : 0.0) +
                    gamma * uniform;
      }
    } else {
      for (const auto& [key, c] : a) {
        const HistoryStats& h = hist.at(Key(key.begin(), key.end() - 1));
        double lower = prob[n - 2].at(Key(key.begin() + 1, key.end()));
        p[key] = DiscountedMass(c, h, smoothing) +
                 LowerOrderWeight(h, smoothing) * lower;
      }
      for (const auto& [hkey, h] : hist) {
        ArpaLm::Entry& e = tables[n - 2][hkey];
        e.backoff = std::log10(LowerOrderWeight(h, smoothing));
        e.has_backoff = true;
      }
    }
    for (const auto& [key, value] : p) tables[n - 1][key].logprob = std::log10(value);
  }
  tables[0][Key{Vocabulary::kBosId}].logprob = kLogZero;

  return ArpaLm(std::move(vocab), std::move(tables));
}

double Perplexity(const ArpaLm& lm, const std::vector<std::string>& sentences) {
  if (sentences.empty()) throw Error(ErrorKind::kEmptyCorpus, "no sentences");
  double logprob = 0.0;
  long long tokens = 0;
  for (const std::string& s : sentences) {
    auto words = SplitWords(s);
    logprob += lm.LogProb(words);
    tokens += static_cast<long long>(words.size()) + 1;
  }
  return std::pow(10.0, -logprob / static_cast<double>(tokens));
}

}  // namespace nerkit
