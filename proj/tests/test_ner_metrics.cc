// tests/test_ner_metrics.cc

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


#include <algorithm>
#include <random>

#include "doctest.h"
#include "nerkit/error.h"
#include "nerkit/ner_metrics.h"
#include "test_util.h"

using namespace nerkit;

namespace {

std::vector<EntityTuple> RandomTuples(std::mt19937_64& rng) {
  static const char* kTags[] = {"A", "B"};
  static const char* kPhrases[] = {"x", "y", "x y"};
  std::vector<EntityTuple> t(rng() % 7);
  for (auto& e : t) e = {kTags[rng() % 2], kPhrases[rng() % 3]};
  return t;
}

}  // namespace

TEST_CASE("match_tuples examples") {
  auto r = MatchTuples({{"WHEN", "one month"}},
                       {{"WHEN", "one month"}, {"ORG", "council"}});
  CHECK(r.true_positive == 1);
  CHECK(r.false_positive == 1);
  CHECK(r.false_negative == 0);
  REQUIRE(r.matched_pairs.size() == 1);
  CHECK(r.matched_pairs[0] == std::make_pair(0, 0));

  r = MatchTuples({}, {});
  CHECK(r.true_positive + r.false_positive + r.false_negative == 0);

  r = MatchTuples({{"A", "x"}, {"A", "x"}}, {{"A", "x"}});
  CHECK(r.true_positive == 1);
  CHECK(r.false_negative == 1);
  CHECK(r.false_positive == 0);
}

TEST_CASE("match_tuples equals brute-force maximum matching") {
  std::mt19937_64 rng(99);
  for (int iter = 0; iter < 1000; ++iter) {
    auto gt = RandomTuples(rng), pred = RandomTuples(rng);
    auto r = MatchTuples(gt, pred);
    int best = testing::OracleMaxMatching(gt, pred);
    REQUIRE(r.true_positive == best);
    CHECK(r.true_positive + r.false_negative == static_cast<long long>(gt.size()));
    CHECK(r.true_positive + r.false_positive == static_cast<long long>(pred.size()));
    // One-to-one, on equal tuples.
    std::vector<bool> g_used(gt.size()), p_used(pred.size());
    for (auto [g, p] : r.matched_pairs) {
      CHECK(gt[g] == pred[p]);
      CHECK_FALSE(g_used[g]);
      CHECK_FALSE(p_used[p]);
      g_used[g] = p_used[p] = true;
    }
    // Permutation invariance.
    std::shuffle(gt.begin(), gt.end(), rng);
    std::shuffle(pred.begin(), pred.end(), rng);
    auto s = MatchTuples(gt, pred);
    CHECK(s.true_positive == r.true_positive);
    CHECK(s.false_positive == r.false_positive);
    CHECK(s.false_negative == r.false_negative);
  }
}

TEST_CASE("micro_prf examples") {
  TupleMatchResult one;
  one.true_positive = 1;
  one.false_positive = 1;
  auto s = MicroPrf(std::vector<TupleMatchResult>{one});
  CHECK(s.precision == 0.5);
  CHECK(s.recall == 1.0);
  // 2PR/(P+R) with P=1/2, R=1 is 2/3.
  CHECK(s.f1 == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK_FALSE(s.degenerate);

  TupleMatchResult perfect;
  perfect.true_positive = 4;
  s = MicroPrf(std::vector<TupleMatchResult>{perfect});
  CHECK(s.precision == 1.0);
  CHECK(s.recall == 1.0);
  CHECK(s.f1 == 1.0);

  TupleMatchResult bad;
  bad.false_positive = 2;
  bad.false_negative = 3;
  s = MicroPrf(std::vector<TupleMatchResult>{bad});
  CHECK(s.precision == 0.0);
  CHECK(s.recall == 0.0);
  CHECK(s.f1 == 0.0);
  CHECK(s.degenerate);

  s = MicroPrf(std::vector<TupleMatchResult>{});
  CHECK(s.degenerate);
}

TEST_CASE("micro averaging is associative over corpus splits") {
  std::mt19937_64 rng(4);
  for (int iter = 0; iter < 200; ++iter) {
    std::vector<TupleMatchResult> all;
    int n = 1 + static_cast<int>(rng() % 20);
    for (int i = 0; i < n; ++i) all.push_back(MatchTuples(RandomTuples(rng), RandomTuples(rng)));
    size_t cut = rng() % (all.size() + 1);
    PrfCounts left, right, whole;
    for (size_t i = 0; i < all.size(); ++i) {
      (i < cut ? left : right) += all[i];
      whole += all[i];
    }
    PrfCounts summed = left;
    summed += right;
    CHECK(summed.true_positive == whole.true_positive);
    CHECK(summed.false_positive == whole.false_positive);
    CHECK(summed.false_negative == whole.false_negative);
    auto a = MicroPrf(summed), b = MicroPrf(all);
    CHECK(a.f1 == b.f1);
    double m = std::min(b.precision, b.recall);
    CHECK(b.f1 <= 2 * m / (1 + m) + 1e-12);
  }
}

TEST_CASE("label mapping") {
  LabelMapping m = LabelMapping::Load(testing::SourcePath("config/label_map.tsv"));
  CHECK(m.pairs() == LabelMapping::Default().pairs());
  auto out = MapLabels({{"GPE", "eu", 13, 1}, {"NORP", "irish", 1, 1}}, m);
  CHECK(out[0] == EntityMention{"PLACE", "eu", 13, 1});
  CHECK(out[1] == EntityMention{"NORP", "irish", 1, 1});

  std::vector<EntityMention> adjacent = {{"GPE", "a", 0, 1}, {"LOC", "b", 1, 1}};
  CHECK(MapLabels(adjacent, m).size() == 2);  // not merged

  LabelMapping id = LabelMapping::Identity(TagMap::Default());
  CHECK(MapLabels(adjacent, id) == adjacent);
  try {
    MapLabels({{"NOPE", "a", 0, 1}}, m);
    FAIL("expected UnknownFineTag");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kUnknownFineTag);
  }
  // Every fine tag of the default map is covered.
  for (const auto& e : TagMap::Default().entries()) CHECK_NOTHROW(m.Map(e.tag));
}
