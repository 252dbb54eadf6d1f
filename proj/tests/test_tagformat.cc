// tests/test_tagformat.cc

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


#include <random>

#include "doctest.h"
#include "nerkit/error.h"
#include "nerkit/tagformat.h"
#include "test_util.h"

using namespace nerkit;

namespace {

const char* kIrishSentence =
    "the irish system works within a legal and regulatory policy directive "
    "framework dictated by the eu";
const char* kIrishTagged =
    "the $ irish ] system works within a legal and regulatory policy directive "
    "framework dictated by the % eu ]";

}  // namespace

TEST_CASE("encode: published sentence") {
  std::vector<EntityMention> m = {{"NORP", "irish", 1, 1}, {"GPE", "eu", 15, 1}};
  CHECK(EncodeTagged(kIrishSentence, m, TagMap::Default()) == kIrishTagged);
}

TEST_CASE("encode: trivial and hand-built cases") {
  CHECK(EncodeTagged("hello world", {}, TagMap::Default()) == "hello world");
  TagMap when({{"WHEN", '@'}});
  // Built character by character: "a", " ", "@", " ", "b c", " ", "]".
  std::string expect = std::string("a") + ' ' + '@' + ' ' + "b c" + ' ' + ']';
  CHECK(EncodeTagged("a b c", {{"WHEN", "b c", 1, 2}}, when) == expect);
  CHECK(EncodeTagged("  a   b ", {{"WHEN", "a", 0, 1}}, when) == "@ a ] b");
}

TEST_CASE("encode: errors") {
  TagMap when({{"WHEN", '@'}});
  CHECK_THROWS_AS(EncodeTagged("a b", {{"ORG", "a", 0, 1}}, when), Error);
  try {
    EncodeTagged("a b c", {{"WHEN", "a b", 0, 2}, {"WHEN", "b c", 1, 2}}, when);
    FAIL("expected overlap");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kOverlap);
  }
  try {
    EncodeTagged("a b", {{"WHEN", "x", 0, 1}}, when);
    FAIL("expected invalid mention");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kInvalidMention);
  }
}

TEST_CASE("parse: published sentence") {
  auto p = ParseTagged(kIrishTagged, TagMap::Default(), ParsePolicy::kStrict);
  CHECK(p.plain_text == kIrishSentence);
  REQUIRE(p.mentions.size() == 2);
  CHECK(p.mentions[0] == EntityMention{"NORP", "irish", 1, 1});
  CHECK(p.mentions[1] == EntityMention{"GPE", "eu", 15, 1});
  CHECK(p.diagnostics.empty());
}

TEST_CASE("parse: recovery rules") {
  const TagMap& tm = TagMap::Default();
  SUBCASE("unclosed span closes at the end") {
    auto p = ParseTagged("a $ b", tm, ParsePolicy::kRecover);
    CHECK(p.plain_text == "a b");
    REQUIRE(p.mentions.size() == 1);
    CHECK(p.mentions[0] == EntityMention{"NORP", "b", 1, 1});
    REQUIRE(p.diagnostics.size() == 1);
    CHECK(p.diagnostics[0].kind == DiagnosticKind::kUnclosed);
  }
  SUBCASE("stray close is dropped") {
    auto p = ParseTagged("a ] b", tm, ParsePolicy::kRecover);
    CHECK(p.plain_text == "a b");
    CHECK(p.mentions.empty());
    REQUIRE(p.diagnostics.size() == 1);
    CHECK(p.diagnostics[0].kind == DiagnosticKind::kStrayClose);
  }
  SUBCASE("nested open closes the outer span") {
    auto p = ParseTagged("$ a % b ] c", tm, ParsePolicy::kRecover);
    CHECK(p.plain_text == "a b c");
    REQUIRE(p.mentions.size() == 2);
    CHECK(p.mentions[0] == EntityMention{"NORP", "a", 0, 1});
    CHECK(p.mentions[1] == EntityMention{"GPE", "b", 1, 1});
    REQUIRE(p.diagnostics.size() == 1);
    CHECK(p.diagnostics[0].kind == DiagnosticKind::kNestedOpen);
  }
  SUBCASE("strict mode rejects every recovery condition") {
    for (const char* bad : {"a $ b", "a ] b", "$ a % b ] c", "a $ ] b"}) {
      try {
        ParseTagged(bad, tm, ParsePolicy::kStrict);
        FAIL(bad);
      } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::kMalformedTagging);
      }
    }
  }
  SUBCASE("delimiters glued to words are accepted") {
    auto p = ParseTagged("the $irish] system", tm, ParsePolicy::kStrict);
    CHECK(p.plain_text == "the irish system");
    CHECK(EncodeTagged(p.plain_text, p.mentions, tm) == "the $ irish ] system");
  }
}

TEST_CASE("strip_tags") {
  const TagMap& tm = TagMap::Default();
  CHECK(StripTags("the $ irish ] system", tm) == "the irish system");
  CHECK(StripTags("x y z", tm) == "x y z");
  CHECK(StripTags("a $ b", tm) == "a b");
  CHECK(NormalizeForScoring("The  $ Irish ]", tm) == "the irish");
}

TEST_CASE("round trip and idempotence on random inputs") {
  const TagMap& tm = TagMap::Default();
  std::mt19937_64 rng(11);
  const char* words[] = {"a", "b", "it's", "x9", "eu", "irish", "zz"};
  for (int iter = 0; iter < 2000; ++iter) {
    int n = static_cast<int>(rng() % 10);
    std::vector<std::string> w;
    for (int i = 0; i < n; ++i) w.push_back(words[rng() % 7]);
    std::vector<EntityMention> mentions;
    int pos = 0;
    while (pos < n) {
      if (rng() % 3 == 0) {
        int len = 1 + static_cast<int>(rng() % std::min(3, n - pos));
        std::span<const std::string> s(w.data() + pos, len);
        mentions.push_back({tm.entries()[rng() % tm.entries().size()].tag,
                            JoinWords(s), pos, len});
        pos += len;
      } else {
        ++pos;
      }
    }
    std::string plain = JoinWords(w);
    std::string enc = EncodeTagged(plain, mentions, tm);
    auto p = ParseTagged(enc, tm, ParsePolicy::kStrict);
    REQUIRE(p.plain_text == plain);
    REQUIRE(p.mentions == mentions);
    CHECK(EncodeTagged(p.plain_text, p.mentions, tm) == enc);
  }
}

TEST_CASE("recover mode is total and strip removes all tag characters") {
  const TagMap& tm = TagMap::Default();
  std::string alphabet = "ab '0";
  for (const auto& e : tm.entries()) alphabet += e.open_char;
  alphabet += tm.close_char();
  std::mt19937_64 rng(5);
  for (int iter = 0; iter < 2000; ++iter) {
    std::string s;
    int n = static_cast<int>(rng() % 30);
    for (int i = 0; i < n; ++i) s += alphabet[rng() % alphabet.size()];
    auto p = ParseTagged(s, tm, ParsePolicy::kRecover);
    std::string stripped = StripTags(s, tm);
    CHECK(stripped == p.plain_text);
    for (char c : stripped) CHECK_FALSE(tm.IsTagChar(c));
    // Canonical idempotence.
    std::string once = EncodeTagged(p.plain_text, p.mentions, tm);
    auto q = ParseTagged(once, tm, ParsePolicy::kStrict);
    CHECK(EncodeTagged(q.plain_text, q.mentions, tm) == once);
  }
}

TEST_CASE("tag map validation and config files") {
  CHECK_THROWS_AS(TagMap({{"A", '$'}, {"B", '$'}}), Error);
  CHECK_THROWS_AS(TagMap({{"A", 'x'}}), Error);
  CHECK_THROWS_AS(TagMap({{"A", ']'}}), Error);
  CHECK_THROWS_AS(TagMap({{"A", '$'}, {"A", '%'}}), Error);
  CHECK_THROWS_AS(TagMap({{"", '$'}}), Error);
  TagMap loaded = TagMap::Load(testing::SourcePath("config/tagmap.tsv"));
  CHECK(loaded.ToConfig() == TagMap::Default().ToConfig());
  TagMap reparsed = TagMap::Parse(TagMap::Default().ToConfig());
  CHECK(reparsed.ToConfig() == TagMap::Default().ToConfig());
  TagMap combined = TagMap::Load(testing::SourcePath("config/tagmap_combined.tsv"));
  CHECK(combined.TagFor('%') == "PLACE");
  CHECK(combined.TagFor('@') == "WHEN");
  CHECK(combined.TagFor('`') == "ORG");
}
