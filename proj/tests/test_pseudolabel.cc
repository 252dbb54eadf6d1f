// tests/test_pseudolabel.cc

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


#include <map>

#include "doctest.h"
#include "nerkit/alignment.h"
#include "nerkit/pseudolabel.h"
#include "test_util.h"

using namespace nerkit;
using namespace nerkit::testing;

namespace {

// A tagger that answers with fixed, possibly malformed, output.
class FixedTagger : public Backend {
 public:
  explicit FixedTagger(std::map<std::string, std::string> out) : out_(std::move(out)) {}
  std::set<Capability> capabilities() const override { return {Capability::kTagText}; }
  std::string identity() const override { return "fixed"; }
  std::vector<BackendResponse> Invoke(
      Capability, const std::vector<BackendRequest>& reqs) const override {
    std::vector<BackendResponse> rs;
    for (const auto& q : reqs) {
      auto it = out_.find(q.id);
      if (it != out_.end()) rs.push_back({q.id, q.in, it->second, true});
    }
    return rs;
  }

 private:
  std::map<std::string, std::string> out_;
};

BackendBindings All(const Backend& b) { return {&b, &b, &b}; }

}  // namespace

TEST_CASE("method names round trip") {
  for (Method m : kAllMethods) CHECK(ParseMethod(MethodName(m)) == m);
  CHECK_FALSE(ParseMethod("SelfTrain").has_value());
}

TEST_CASE("every method/data-type combination is accepted or rejected") {
  auto utts = SyntheticCorpus(20, 1);
  MockBackend mock(SyntheticMock(utts, 0.0, 1));
  int accepted = 0, rejected = 0;
  for (Method m : kAllMethods) {
    for (DataType dt : kAllDataTypes) {
      Manifest ext = SyntheticManifest(utts, dt);
      REQUIRE(InferDataType(ext) == dt);
      CAPTURE(MethodName(m));
      CAPTURE(DataTypeName(dt));
      if (RequiredDataType(m) == dt) {
        MethodRun run = RunMethod(m, ext, All(mock), {});
        CHECK(run.data_type == dt);
        CHECK(run.dropped.empty());
        ++accepted;
      } else {
        CHECK_ERROR_KIND(RunMethod(m, ext, All(mock), {}),
                         ErrorKind::kIncompatibleMethod);
        ++rejected;
      }
    }
  }
  CHECK(accepted == 7);
  CHECK(rejected == 14);
}

TEST_CASE("missing backends are rejected") {
  auto utts = SyntheticCorpus(5, 2);
  Manifest ext = SyntheticManifest(utts, DataType::kUnSp);
  MockBackend mock(SyntheticMock(utts, 0.0, 1));
  BackendBindings only_asr{&mock, nullptr, nullptr};
  CHECK_ERROR_KIND(RunMethod(Method::kDistillPipeline, ext, only_asr, {}),
                   ErrorKind::kIncompatibleMethod);
  CHECK_NOTHROW(RunMethod(Method::kSelfTrainAsr, ext, only_asr, {}));
}

TEST_CASE("clean pipeline distillation reproduces the hidden references") {
  auto utts = SyntheticCorpus(200, 3);
  MockBackend mock(SyntheticMock(utts, 0.0, 2));
  MethodRun run = RunMethod(Method::kDistillPipeline,
                            SyntheticManifest(utts, DataType::kUnSp), All(mock), {});
  REQUIRE(run.pseudo.records.size() == utts.size());
  for (size_t i = 0; i < utts.size(); ++i) {
    CHECK(run.pseudo.records[i].tagged_text == utts[i].tagged);
    CHECK(run.pseudo.records[i].audio_ref == "audio/" + utts[i].id + ".flac");
  }
  CHECK(run.lm_corpus.size() == utts.size());
  CHECK(run.pseudo.role == SplitRole::kPseudo);
}

TEST_CASE("pseudo-label WER grows with the noise level") {
  auto utts = SyntheticCorpus(500, 4);
  Manifest ext = SyntheticManifest(utts, DataType::kUnSp);
  double prev = -1;
  for (double eps : {0.05, 0.15, 0.30}) {
    MockBackend mock(SyntheticMock(utts, eps, 3));
    MethodRun run = RunMethod(Method::kSelfTrainAsr, ext, All(mock), {});
    REQUIRE(run.pseudo.records.size() == utts.size());
    WerStats total;
    for (size_t i = 0; i < utts.size(); ++i) {
      total += ComputeWerStats(SplitWords(utts[i].plain),
                               SplitWords(run.pseudo.records[i].text));
    }
    CAPTURE(eps);
    CHECK(total.Rate() > prev);
    CHECK(total.Rate() == doctest::Approx(eps).epsilon(0.35));
    prev = total.Rate();
  }
}

TEST_CASE("per-method outputs") {
  auto utts = SyntheticCorpus(30, 5);
  MockBackend mock(SyntheticMock(utts, 0.0, 1));
  Manifest ftune = SyntheticManifest(SyntheticCorpus(4, 99), DataType::kSpTxt);
  for (auto& r : ftune.records) r.utt_id = "ft_" + r.utt_id;
  MethodRunOptions opt;
  opt.ftune = &ftune;

  SUBCASE("Pre-ASR passes transcribed speech through and uses ftune text for the LM") {
    MethodRun run = RunMethod(Method::kPreAsr, SyntheticManifest(utts, DataType::kSpTxt),
                              All(mock), opt);
    CHECK(run.pseudo.records.size() == utts.size());
    CHECK(run.pseudo.records[0].text == utts[0].plain);
    CHECK(run.pseudo.records[0].tagged_text.empty());
    CHECK(run.lm_corpus.size() == ftune.records.size());
    REQUIRE(run.merged.has_value());
    CHECK(run.merged->records.size() == utts.size() + ftune.records.size());
    CHECK(run.backends.empty());
  }
  SUBCASE("Distill-txtNER-lm yields only an LM corpus") {
    MethodRun run = RunMethod(Method::kDistillTxtNerLm,
                              SyntheticManifest(utts, DataType::kUnTxt), All(mock), opt);
    CHECK(run.pseudo.records.empty());
    CHECK(run.lm_corpus.size() == utts.size());
    CHECK(run.lm_corpus[3] == utts[3].tagged);
    CHECK_FALSE(run.merged.has_value());
  }
  SUBCASE("SelfTrain-txtNER labels text without audio and has no LM corpus") {
    MethodRun run = RunMethod(Method::kSelfTrainTxtNer,
                              SyntheticManifest(utts, DataType::kUnTxt), All(mock), opt);
    CHECK(run.pseudo.records.size() == utts.size());
    CHECK(run.pseudo.records[0].audio_ref.empty());
    CHECK(run.lm_corpus.empty());
  }
  SUBCASE("Distill-txtNER keeps the audio of transcribed speech") {
    MethodRun run = RunMethod(Method::kDistillTxtNer,
                              SyntheticManifest(utts, DataType::kSpTxt), All(mock), opt);
    CHECK(run.pseudo.records[2].audio_ref == "audio/" + utts[2].id + ".flac");
    CHECK(run.pseudo.records[2].tagged_text == utts[2].tagged);
    CHECK(run.lm_corpus.size() == utts.size());
  }
  SUBCASE("SelfTrain-E2E calls only the end-to-end tagger") {
    MethodRun run = RunMethod(Method::kSelfTrainE2e,
                              SyntheticManifest(utts, DataType::kUnSp),
                              BackendBindings{nullptr, nullptr, &mock}, opt);
    REQUIRE(run.backends.size() == 1);
    CHECK(run.backends[0].first == "e2e_ner");
  }
}

TEST_CASE("failed records are dropped and logged") {
  auto utts = SyntheticCorpus(300, 6);
  auto mopt = SyntheticMock(utts, 0.0, 1);
  mopt.failure_rate = 0.25;
  MockBackend mock(mopt);
  MethodRunOptions opt;
  opt.batch_size = 16;
  opt.jobs = 2;
  MethodRun run = RunMethod(Method::kSelfTrainE2e,
                            SyntheticManifest(utts, DataType::kUnSp), All(mock), opt);
  CHECK(run.dropped.size() + run.pseudo.records.size() == utts.size());
  CHECK(run.dropped.size() > 30);
  CHECK(run.dropped.size() < 120);
}

TEST_CASE("merging datasets") {
  Manifest ft, ps;
  for (const char* id : {"b", "a"}) ft.records.push_back({id, "", std::string("ft ") + id, "", {}});
  for (const char* id : {"c", "a", "d"}) ps.records.push_back({id, "", std::string("ps ") + id, "", {}});
  std::vector<std::string> coll;
  Manifest m = MergeDatasets(ft, ps, &coll);
  std::vector<std::string> ids, texts;
  for (auto& r : m.records) ids.push_back(r.utt_id), texts.push_back(r.text);
  CHECK(ids == std::vector<std::string>{"b", "a", "c", "d"});
  CHECK(texts[1] == "ft a");
  CHECK(coll == std::vector<std::string>{"a"});
  CHECK(MergeDatasets(Manifest{}, Manifest{}).records.empty());
}

TEST_CASE("pseudo labels parse strictly or carry diagnostics") {
  Manifest ext;
  for (const char* id : {"u1", "u2", "u3"}) {
    ext.records.push_back({id, "", "word in kasai", "", {}});
  }
  FixedTagger tagger({{"u1", "word in % kasai ]"},
                      {"u2", "word in % kasai"},       // unclosed
                      {"u3", "] word in % ] kasai"}});  // stray close, empty span
  MethodRun run = RunMethod(Method::kSelfTrainTxtNer, ext,
                            BackendBindings{nullptr, &tagger, nullptr}, {});
  REQUIRE(run.pseudo.records.size() == 3);
  std::map<std::string, size_t> diag;
  for (auto& r : run.records) diag[r.utt_id] += r.diagnostics.size();
  CHECK(diag["u1"] == 0);
  CHECK(diag["u2"] > 0);
  CHECK(diag["u3"] > 0);
  for (const auto& r : run.pseudo.records) {
    CHECK_NOTHROW(ParseTagged(r.tagged_text, TagMap::Default(), ParsePolicy::kStrict));
  }
  CHECK(run.pseudo.records[0].tagged_text == "word in % kasai ]");
  CHECK(ProvenanceToJson(run).find("unclosed") != std::string::npos);
}

TEST_CASE("provenance timestamps honor SOURCE_DATE_EPOCH") {
  ::setenv("SOURCE_DATE_EPOCH", "86400", 1);
  CHECK(ProvenanceTimestamp() == "1970-01-02T00:00:00Z");
  ::unsetenv("SOURCE_DATE_EPOCH");
  CHECK(ProvenanceTimestamp().size() == 20);
}
