// tests/test_backend.cc

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
#include <set>

#include "doctest.h"
#include "nerkit/backend.h"
#include "test_util.h"

using namespace nerkit;
using namespace nerkit::testing;

namespace {

std::vector<BackendRequest> RequestsFor(const std::vector<SyntheticUtt>& utts,
                                        bool with_text) {
  std::vector<BackendRequest> out;
  for (const auto& u : utts) out.push_back({u.id, with_text ? u.plain : ""});
  return out;
}

std::string RefsFile(const std::vector<SyntheticUtt>& utts, const std::string& dir) {
  std::string data;
  for (const auto& u : utts) data += u.id + "\t" + u.tagged + "\n";
  WriteFile(dir + "/refs.tsv", data);
  return dir + "/refs.tsv";
}

}  // namespace

TEST_CASE("wire records round trip") {
  std::vector<BackendResponse> rs = {{"u1", "in \"q\"", "out\ttab", true},
                                     {"u2", "", "", false},
                                     {"u\xc3\xa9", "caf\xc3\xa9", "x", true}};
  auto back = DecodeResponses(EncodeResponses(rs));
  REQUIRE(back.size() == rs.size());
  for (size_t i = 0; i < rs.size(); ++i) {
    CHECK(back[i].id == rs[i].id);
    CHECK(back[i].in == rs[i].in);
    CHECK(back[i].out == rs[i].out);
    CHECK(back[i].ok == rs[i].ok);
  }
  std::vector<BackendRequest> qs = {{"a", "b c"}, {"d", ""}};
  auto qb = DecodeRequests(EncodeRequests(qs) + "\n\n");
  REQUIRE(qb.size() == 2);
  CHECK(qb[0].in == "b c");
  CHECK_ERROR_KIND(DecodeResponses("{\"id\": 1\n"), ErrorKind::kBackendFailure);
  CHECK(ParseCapability("e2e_ner") == Capability::kE2eNer);
  CHECK_FALSE(ParseCapability("asr").has_value());
}

TEST_CASE("noise channel at zero rate is the identity") {
  for (const auto& u : SyntheticCorpus(200, 1)) {
    auto w = SplitWords(u.plain);
    NoiseCounts c;
    CHECK(ApplyNoiseChannel(w, NoiseModel{}, 7, u.id, &c) == w);
    CHECK(c.substituted + c.deleted + c.inserted == 0);
  }
}

TEST_CASE("noise channel hits its configured rates") {
  auto utts = SyntheticCorpus(1500, 2);
  NoiseCounts c;
  long long subs_by_alignment = 0;
  for (const auto& u : utts) {
    auto w = SplitWords(u.plain);
    auto noisy = ApplyNoiseChannel(w, NoiseModel{0.1, 0, 0}, 11, u.id, &c);
    REQUIRE(noisy.size() == w.size());
    for (size_t i = 0; i < w.size(); ++i) subs_by_alignment += noisy[i] != w[i];
  }
  REQUIRE(c.words >= 10000);
  double rate = static_cast<double>(c.substituted) / c.words;
  CHECK(rate == doctest::Approx(0.1).epsilon(0.1));  // 0.1 +/- 0.01
  CHECK(subs_by_alignment == c.substituted);

  NoiseCounts d;
  for (const auto& u : utts) {
    ApplyNoiseChannel(SplitWords(u.plain), NoiseModel::Uniform(0.2), 11, u.id, &d);
  }
  CHECK(static_cast<double>(d.deleted) / d.words == doctest::Approx(0.05).epsilon(0.2));
  CHECK(static_cast<double>(d.inserted) / d.words == doctest::Approx(0.05).epsilon(0.2));
}

TEST_CASE("noise channel depends only on seed and key") {
  std::vector<std::string> w = SplitWords("the council met in kasai on monday to vote");
  auto a = ApplyNoiseChannel(w, NoiseModel::Uniform(0.5), 3, "k1");
  CHECK(ApplyNoiseChannel(w, NoiseModel::Uniform(0.5), 3, "k1") == a);
  int differs = 0;
  for (int s = 4; s < 20; ++s) {
    differs += ApplyNoiseChannel(w, NoiseModel::Uniform(0.5), s, "k1") != a;
  }
  CHECK(differs > 0);
}

TEST_CASE("gazetteer prefers the longest match") {
  Gazetteer g({{"new york", "GPE"}, {"new york times", "ORG"}, {"york", "GPE"}});
  auto m = g.Tag(SplitWords("the new york times in york new york"));
  REQUIRE(m.size() == 3);
  CHECK(m[0].tag == "ORG");
  CHECK(m[0].start_word == 1);
  CHECK(m[0].word_count == 3);
  CHECK(m[1].start_word == 5);
  CHECK(m[2].phrase == "new york");
  Gazetteer p = Gazetteer::Parse("# comment\nkasai\tGPE\n\neuropean commission\tORG\n");
  CHECK(p.size() == 2);
  Gazetteer t = Gazetteer::FromTagged({"in % kasai ] and ` eurostat ]"}, TagMap::Default());
  CHECK(t.size() == 2);
}

TEST_CASE("mock backend: clean labels reproduce the references") {
  auto utts = SyntheticCorpus(100, 3);
  MockBackend mock(SyntheticMock(utts, 0.0, 1));
  auto asr = mock.Invoke(Capability::kTranscribe, RequestsFor(utts, false));
  auto e2e = mock.Invoke(Capability::kE2eNer, RequestsFor(utts, false));
  auto txt = mock.Invoke(Capability::kTagText, RequestsFor(utts, true));
  for (size_t i = 0; i < utts.size(); ++i) {
    CHECK(asr[i].ok);
    CHECK(asr[i].out == utts[i].plain);
    CHECK(e2e[i].out == utts[i].tagged);
    CHECK(txt[i].out == utts[i].tagged);
  }
  auto unknown = mock.Invoke(Capability::kTranscribe, {{"nope", ""}});
  CHECK_FALSE(unknown[0].ok);
}

TEST_CASE("mock backend failure rate and capability checks") {
  auto utts = SyntheticCorpus(2000, 4);
  auto opt = SyntheticMock(utts, 0.0, 5);
  opt.failure_rate = 0.2;
  MockBackend mock(opt);
  auto rs = mock.Invoke(Capability::kTranscribe, RequestsFor(utts, false));
  double failed = std::count_if(rs.begin(), rs.end(), [](auto& r) { return !r.ok; });
  CHECK(failed / rs.size() == doctest::Approx(0.2).epsilon(0.15));

  opt.failure_rate = 0;
  opt.capabilities = {Capability::kTagText};
  MockBackend only_text(opt);
  CHECK_ERROR_KIND(only_text.Invoke(Capability::kTranscribe, {{"a", ""}}),
                   ErrorKind::kBackendFailure);
  opt.noise.sub_rate = 1.5;
  CHECK_THROWS(MockBackend(opt));
}

TEST_CASE("batched invocation is independent of batch size and threads") {
  auto utts = SyntheticCorpus(300, 6);
  auto opt = SyntheticMock(utts, 0.2, 9);
  opt.failure_rate = 0.1;
  MockBackend mock(opt);
  auto reqs = RequestsFor(utts, false);
  auto ref = InvokeBatched(mock, Capability::kE2eNer, reqs, 0, 1);
  for (size_t bs : {1u, 7u, 64u, 1000u}) {
    for (int jobs : {1, 3}) {
      CHECK(InvokeBatched(mock, Capability::kE2eNer, reqs, bs, jobs) == ref);
    }
  }
  // Reordered requests give the same per-id outputs.
  auto shuffled = reqs;
  std::reverse(shuffled.begin(), shuffled.end());
  auto rev = InvokeBatched(mock, Capability::kE2eNer, shuffled, 16, 2);
  for (size_t i = 0; i < reqs.size(); ++i) CHECK(rev[reqs.size() - 1 - i] == ref[i]);
}

TEST_CASE("command backend speaks the wire protocol") {
  auto utts = SyntheticCorpus(60, 7);
  auto dir = ScratchDir("cmdbackend");
  std::string refs = RefsFile(utts, dir);
  std::string cmd = std::string(NERKIT_MOCK_BACKEND) + " --refs " + refs +
                    " --noise 0.2 --seed 4";
  CommandBackend backend(cmd, {Capability::kTranscribe, Capability::kE2eNer});
  MockBackend local(SyntheticMock(utts, 0.2, 4));
  auto reqs = RequestsFor(utts, false);
  for (Capability cap : {Capability::kTranscribe, Capability::kE2eNer}) {
    auto remote = InvokeBatched(backend, cap, reqs, 25, 2);
    auto mine = InvokeBatched(local, cap, reqs, 0, 1);
    CHECK(remote == mine);
  }
}

TEST_CASE("command backend salvages complete records from a crash") {
  auto utts = SyntheticCorpus(20, 8);
  auto dir = ScratchDir("cmdcrash");
  std::string refs = RefsFile(utts, dir);
  CommandBackend crashing(std::string(NERKIT_MOCK_BACKEND) + " --refs " + refs +
                              " --die-after 5",
                          {Capability::kTranscribe});
  auto out = InvokeBatched(crashing, Capability::kTranscribe,
                           RequestsFor(utts, false), 0, 1);
  for (size_t i = 0; i < out.size(); ++i) {
    CHECK(out[i].has_value() == (i < 5));
    if (i < 5) CHECK(*out[i] == utts[i].plain);
  }
  CommandBackend dead(std::string(NERKIT_MOCK_BACKEND) + " --refs " + refs +
                          " --die-after 0",
                      {Capability::kTranscribe});
  CHECK_ERROR_KIND(dead.Invoke(Capability::kTranscribe, RequestsFor(utts, false)),
                   ErrorKind::kBackendFailure);
  CommandBackend missing("/nonexistent/labeler", {Capability::kTranscribe});
  CHECK_ERROR_KIND(missing.Invoke(Capability::kTranscribe, RequestsFor(utts, false)),
                   ErrorKind::kBackendFailure);
}
