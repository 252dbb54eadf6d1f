// tests/test_ngram_lm.cc

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


#include <cmath>
#include <map>
#include <random>

#include "doctest.h"
#include "nerkit/error.h"
#include "nerkit/ngram_lm.h"
#include "test_util.h"

using namespace nerkit;

namespace {

std::vector<std::string> RandomCorpus(int sentences, int vocab, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::string> out;
  for (int s = 0; s < sentences; ++s) {
    int len = 1 + static_cast<int>(rng() % 8);
    std::vector<std::string> w;
    // Skewed draws so that counts of 1..4 all occur.
    for (int i = 0; i < len; ++i) {
      int k = static_cast<int>(rng() % vocab);
      if (rng() % 2) k = k % std::max(1, vocab / 4);
      w.push_back("w" + std::to_string(k));
    }
    out.push_back(JoinWords(w));
  }
  return out;
}

// Sum over the predictable words of P(w | history), for every history of
// length order-1 over the vocabulary (including <s>).
double WorstNormalizationError(const ArpaLm& lm) {
  auto words = lm.PredictableWords();
  std::vector<WordId> alphabet = words;
  alphabet.push_back(Vocabulary::kBosId);
  int ctx = lm.order() - 1;
  std::vector<size_t> idx(ctx, 0);
  double worst = 0.0;
  while (true) {
    std::vector<WordId> history;
    for (size_t i : idx) history.push_back(alphabet[i]);
    double sum = 0.0;
    for (WordId w : words) sum += std::pow(10.0, lm.Score(history, w));
    worst = std::max(worst, std::abs(sum - 1.0));
    int k = ctx - 1;
    while (k >= 0 && ++idx[k] == alphabet.size()) idx[k--] = 0;
    if (k < 0) break;
  }
  return worst;
}

}  // namespace

TEST_CASE("single-word corpus: hand-computed Witten-Bell unigrams") {
  LmTrainOptions opt;
  opt.order = 1;
  ArpaLm lm = TrainArpa({"a"}, opt);
  auto p = [&](std::string_view w) {
    WordId id = lm.vocab().Find(w);
    return std::pow(10.0, lm.Score({}, id));
  };
  // counts a=1, </s>=1; gamma = 2/(2+2); base uniform over {a, </s>, <unk>}.
  CHECK(p("a") == doctest::Approx(5.0 / 12.0).epsilon(1e-12));
  CHECK(p("</s>") == doctest::Approx(5.0 / 12.0).epsilon(1e-12));
  CHECK(p("<unk>") == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  CHECK(lm.Score({}, Vocabulary::kBosId) == kLogZero);
}

TEST_CASE("per-history normalization, Kneser-Ney and Witten-Bell") {
  for (Smoothing sm : {Smoothing::kKneserNey, Smoothing::kWittenBell}) {
    for (int order = 1; order <= 4; ++order) {
      LmTrainOptions opt;
      opt.order = order;
      opt.smoothing = sm;
      LmTrainInfo info;
      ArpaLm lm = TrainArpa(RandomCorpus(400, 9, 10 + order), opt, &info);
      CAPTURE(order);
      CHECK(WorstNormalizationError(lm) < 1e-6);
    }
  }
}

TEST_CASE("closed vocabulary drops <unk> and OOV words score -inf") {
  LmTrainOptions opt;
  opt.order = 2;
  opt.closed_vocabulary = true;
  ArpaLm lm = TrainArpa(RandomCorpus(200, 6, 1), opt);
  CHECK_FALSE(lm.has_unk());
  CHECK(WorstNormalizationError(lm) < 1e-6);
  CHECK(std::isinf(lm.LogProb("w0 never_seen")));
  opt.closed_vocabulary = false;
  ArpaLm open = TrainArpa(RandomCorpus(200, 6, 1), opt);
  CHECK(open.has_unk());
  CHECK(std::isfinite(open.LogProb("w0 never_seen")));
}

TEST_CASE("Kneser-Ney discounts follow the counts-of-counts formula") {
  auto corpus = RandomCorpus(3000, 30, 5);
  LmTrainOptions opt;
  opt.order = 3;
  LmTrainInfo info;
  TrainArpa(corpus, opt, &info);
  // Independent count of highest-order trigrams with single <s>/</s> padding.
  std::map<std::vector<std::string>, long long> tri;
  for (const auto& s : corpus) {
    std::vector<std::string> t = {"<s>"};
    for (auto& w : SplitWords(s)) t.push_back(w);
    t.push_back("</s>");
    for (size_t i = 0; i + 3 <= t.size(); ++i) ++tri[{t[i], t[i + 1], t[i + 2]}];
  }
  double n[5] = {0, 0, 0, 0, 0};
  for (auto& [k, c] : tri) if (c <= 4) n[c] += 1;
  REQUIRE(info.smoothing_used[2] == "modified_kneser_ney");
  double y = n[1] / (n[1] + 2 * n[2]);
  CHECK(info.discounts[2][0] == doctest::Approx(1 - 2 * y * n[2] / n[1]));
  CHECK(info.discounts[2][1] == doctest::Approx(2 - 3 * y * n[3] / n[2]));
  CHECK(info.discounts[2][2] == doctest::Approx(3 - 4 * y * n[4] / n[3]));
}

TEST_CASE("back-off trace by hand") {
  // A tiny hand-written model.
  const char* arpa =
      "\\data\\\nngram 1=4\nngram 2=2\n\n\\1-grams:\n"
      "-99\t<s>\t-0.5\n-0.3\t</s>\n-0.6\ta\t-0.25\n-0.6\tb\n\n"
      "\\2-grams:\n-0.1\t<s> a\n-0.2\ta b\n\n\\end\\\n";
  ArpaLm lm = ArpaLm::ParseArpa(arpa);
  WordId s = Vocabulary::kBosId, a = lm.vocab().Find("a"),
         b = lm.vocab().Find("b"), e = Vocabulary::kEosId;
  std::vector<WordId> hs = {s}, ha = {a}, hb = {b};
  CHECK(lm.Score(hs, a) == doctest::Approx(-0.1));
  CHECK(lm.Score(ha, b) == doctest::Approx(-0.2));
  CHECK(lm.Score(hs, b) == doctest::Approx(-0.5 - 0.6));    // bow(<s>) + p(b)
  CHECK(lm.Score(ha, e) == doctest::Approx(-0.25 - 0.3));   // bow(a) + p(</s>)
  CHECK(lm.Score(hb, a) == doctest::Approx(-0.6));          // no bow for b
  CHECK(lm.LogProb("a b") == doctest::Approx(-0.1 - 0.2 - 0.3));
  CHECK(std::isinf(lm.LogProb("zzz")));  // no <unk> in this model
}

TEST_CASE("ARPA round trip is score-stable") {
  LmTrainOptions opt;
  opt.order = 3;
  ArpaLm lm = TrainArpa(RandomCorpus(500, 12, 3), opt);
  std::string text = lm.ToArpa();
  ArpaLm back = ArpaLm::ParseArpa(text);
  CHECK(back.ToArpa() == text);
  for (const auto& s : RandomCorpus(200, 14, 4)) {
    CHECK(back.LogProb(s) == doctest::Approx(lm.LogProb(s)).epsilon(1e-12));
  }
  auto path = testing::ScratchDir("arpa") + "/lm.arpa";
  lm.Write(path);
  CHECK(ArpaLm::Read(path).ToArpa() == text);
}

TEST_CASE("uniform unigram model has perplexity equal to its vocabulary size") {
  for (int v : {2, 7, 50}) {
    std::string arpa = "\\data\\\nngram 1=" + std::to_string(v + 1) +
                       "\n\n\\1-grams:\n-99\t<s>\n";
    double lp = -std::log10(static_cast<double>(v));
    arpa += FormatDouble(lp) + "\t</s>\n";
    for (int i = 1; i < v; ++i) arpa += FormatDouble(lp) + "\tw" + std::to_string(i) + "\n";
    arpa += "\n\\end\\\n";
    ArpaLm lm = ArpaLm::ParseArpa(arpa);
    CHECK(Perplexity(lm, {"w1 w1", "w1", "w1 w1 w1"}) ==
          doctest::Approx(static_cast<double>(v)).epsilon(1e-9));
  }
}

TEST_CASE("parallel counting equals serial counting") {
  Vocabulary vocab;
  auto corpus = InternCorpus(RandomCorpus(1000, 20, 8), &vocab);
  NgramCounts serial = CountNgramsSerial(corpus, 4);
  for (int jobs : {1, 2, 3, 8}) {
    NgramCounts par = CountNgrams(corpus, 4, jobs);
    for (int n = 1; n <= 4; ++n) CHECK(par.table(n) == serial.table(n));
  }
}

TEST_CASE("errors") {
  LmTrainOptions opt;
  opt.order = 0;
  CHECK_THROWS_AS(TrainArpa({"a"}, opt), Error);
  opt.order = 3;
  try {
    TrainArpa({}, opt);
    FAIL("expected EmptyCorpus");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kEmptyCorpus);
  }
  for (const char* bad : {"", "\\data\\\nngram 1=1\n\\1-grams:\n-1\ta\n",
                          "\\data\\\nngram 1=2\n\\1-grams:\n-1\ta\n\\end\\\n",
                          "\\data\\\nngram 1=1\n\\1-grams:\nx\ta\n\\end\\\n"}) {
    try {
      ArpaLm::ParseArpa(bad);
      FAIL(bad);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kInvalidArpa);
    }
  }
}
