// tests/test_cli.cc

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


// End-to-end checks of the nerkit binary: exit codes, determinism, config
// lookup and the build-pseudo pipeline.

#include "doctest.h"
#include "json.hpp"
#include "test_util.h"

using namespace nerkit;
using namespace nerkit::testing;
using nlohmann::json;

namespace {

CommandResult Cli(const std::string& args, const std::string& env = "") {
  return RunCommand(env + " " + std::string(NERKIT_CLI) + " " + args + " 2>/dev/null");
}

std::string EvalArgs() {
  return "eval --gt " + Fixture("eval_gt.tsv") + " --pred " + Fixture("eval_pred.tsv");
}

}  // namespace

TEST_CASE("eval prints a report and is byte-for-byte deterministic") {
  CommandResult a = Cli(EvalArgs());
  REQUIRE(a.status == 0);
  json j = json::parse(a.out);
  CHECK(j["schema"] == "nerkit.eval/1");
  CHECK(Cli(EvalArgs() + " --jobs 3").out == a.out);
  CommandResult csv = Cli(EvalArgs() + " --format csv");
  CHECK(csv.status == 0);
  CHECK(csv.out.find("metric,value") != std::string::npos);
}

TEST_CASE("exit codes") {
  CHECK(Cli(EvalArgs() + " --strict").status == 2);
  CHECK(Cli("eval --gt /nonexistent.tsv --pred " + Fixture("eval_pred.tsv")).status == 74);
  CHECK(Cli("eval --gt").status == 64);
  CHECK(Cli("frobnicate").status == 64);
  CHECK(Cli(EvalArgs() + " --format xml").status == 64);
  auto dir = ScratchDir("cli-exit");
  WriteFile(dir + "/corpus.txt", "a b\nb c\n");
  CHECK(Cli("train-lm --corpus " + dir + "/corpus.txt --arpa " + dir +
            "/lm.arpa --order 6").status == 64);
  CHECK(Cli("train-lm --corpus " + dir + "/corpus.txt --arpa " + dir +
            "/lm.arpa --order 2").status == 0);
  CHECK(Cli("ppl --lm " + dir + "/lm.arpa --corpus " + dir + "/corpus.txt").status == 0);
  WriteFile(dir + "/um.tsv", "utt_id\taudio_ref\ttext\ttagged_text\tmentions_json\n"
                             "u1\ta.flac\t\t\t\n");
  CHECK(Cli("build-pseudo --method SelfTrain-txtNER --manifest " + dir +
            "/um.tsv --out-dir " + dir + "/o --backend mock").status == 64);
}

TEST_CASE("parse honors strictness and NERKIT_CONFIG") {
  auto dir = ScratchDir("cli-config");
  WriteFile(dir + "/in.txt", "in % kasai ] today\n");
  CommandResult fine = Cli("parse --input " + dir + "/in.txt");
  REQUIRE(fine.status == 0);
  CHECK(json::parse(fine.out)["lines"][0]["mentions"][0]["tag"] == "GPE");
  std::filesystem::create_directories(dir + "/cfg");
  std::filesystem::copy_file(SourcePath("config/tagmap_combined.tsv"),
                             dir + "/cfg/tagmap.tsv");
  CommandResult comb = Cli("parse --input " + dir + "/in.txt", "NERKIT_CONFIG=" + dir + "/cfg");
  REQUIRE(comb.status == 0);
  CHECK(json::parse(comb.out)["lines"][0]["mentions"][0]["tag"] == "PLACE");
  WriteFile(dir + "/bad.txt", "in % kasai today\n");
  CHECK(Cli("parse --input " + dir + "/bad.txt").status == 0);
  CHECK(Cli("parse --strict --input " + dir + "/bad.txt").status == 2);
}

TEST_CASE("decode runs over text posteriors") {
  auto dir = ScratchDir("cli-decode");
  WriteFile(dir + "/p.txt",
            "frames 3\nsymbols 3\nalphabet <blank> a <space>\n"
            "0.1 0.8 0.1\n0.8 0.1 0.1\n0.1 0.8 0.1\n");
  CommandResult r = Cli("decode --beam 8 --alpha 0 --beta 0 " + dir + "/p.txt");
  REQUIRE(r.status == 0);
  CHECK(json::parse(r.out)["results"][0]["nbest"][0]["text"] == "aa");
  CHECK(Cli("decode --greedy " + dir + "/p.txt").status == 0);
  CHECK(Cli("decode --beam 0 " + dir + "/p.txt").status == 64);
}

TEST_CASE("build-pseudo with the in-process and out-of-process mock") {
  auto utts = SyntheticCorpus(40, 11);
  auto dir = ScratchDir("cli-pseudo");
  WriteManifest(SyntheticManifest(utts, DataType::kUnSp), dir + "/ext.tsv");
  std::string refs;
  for (const auto& u : utts) refs += u.id + "\t" + u.tagged + "\n";
  WriteFile(dir + "/refs.tsv", refs);
  std::string common = "build-pseudo --method Distill-Pipeline --manifest " + dir +
                       "/ext.tsv --mock-refs " + dir + "/refs.tsv --batch 7 ";
  std::string env = "SOURCE_DATE_EPOCH=1700000000";
  CommandResult a = Cli(common + "--backend mock --mock-noise 0.1 --seed 2 --out-dir " +
                            dir + "/a", env);
  REQUIRE(a.status == 0);
  CHECK(json::parse(a.out)["pseudo_records"] == 40);
  CommandResult b = Cli(common + "--backend mock --mock-noise 0.1 --seed 2 --out-dir " +
                            dir + "/b --jobs 4", env);
  REQUIRE(b.status == 0);
  for (const char* f : {"pseudo.tsv", "lm_corpus.txt", "provenance.json"}) {
    CHECK(ReadFile(dir + "/a/" + f) == ReadFile(dir + "/b/" + f));
  }
  std::string backend = "'cmd:" + std::string(NERKIT_MOCK_BACKEND) + " --refs " + dir +
                        "/refs.tsv --noise 0.1 --seed 2'";
  CommandResult c = Cli(common + "--backend " + backend + " --out-dir " + dir + "/c", env);
  REQUIRE(c.status == 0);
  CHECK(ReadFile(dir + "/c/pseudo.tsv") == ReadFile(dir + "/a/pseudo.tsv"));
  json prov = json::parse(ReadFile(dir + "/c/provenance.json"));
  CHECK(prov["schema"] == "nerkit.provenance/1");
}
