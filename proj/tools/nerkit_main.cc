// tools/nerkit_main.cc

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

// nerkit: evaluation, decoding and pseudo-labeling for spoken NER.
//
//   nerkit eval --gt dev.tsv --pred hyp.tsv [--strict] [--format csv]
//   nerkit report --report Distill-Pipeline:Un-Sp=a.json ...
//   nerkit decode --lm lm.arpa --beam 100 --alpha 0.5 --beta 1 post.txt
//   nerkit train-lm --corpus tagged.txt --order 4 --out lm.arpa
//   nerkit ppl --lm lm.arpa --corpus dev.txt
//   nerkit build-pseudo --method SelfTrain-ASR --manifest ext.tsv --out-dir d
//   nerkit parse --input tagged.txt --strict

#include <filesystem>
#include <iostream>
#include <map>
#include <memory>

#include "CLI11.hpp"
#include "json.hpp"
#include "nerkit/corpus_eval.h"
#include "nerkit/ctc_decoder.h"
#include "nerkit/ngram_lm.h"
#include "nerkit/pseudolabel.h"
#include "nerkit/report.h"
#include "nerkit/version.h"
#include "tool_util.h"

namespace nerkit::tools {
namespace {

using ojson = nlohmann::ordered_json;

struct Common {
  std::string tagmap;
  std::string format = "json";
  std::string out;
  int jobs = 0;
};

void AddCommon(CLI::App* cmd, Common* c) {
  cmd->add_option("--tagmap", c->tagmap, "tag map config (TAG<TAB>char lines)");
  cmd->add_option("--format", c->format, "output format")
      ->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("-o,--out", c->out, "output file (default stdout)");
  cmd->add_option("--jobs", c->jobs, "worker threads (0 = all cores)")
      ->check(CLI::NonNegativeNumber);
}

void AddPolicy(CLI::App* cmd, bool* strict) {
  auto* s = cmd->add_flag("--strict", *strict, "reject malformed tagging");
  auto* r = cmd->add_flag("--recover", "recover from malformed tagging (default)");
  s->excludes(r);
}

// ---------------------------------------------------------------------------

struct EvalArgs {
  Common common;
  std::string gt, pred, label_map, traces;
  bool no_label_map = false, strict = false;
};

int RunEval(const EvalArgs& a) {
  std::string tagmap_path = ConfigPath(a.common.tagmap, "tagmap.tsv");
  TagMap tagmap = LoadTagMap(tagmap_path);
  std::string label_path = ConfigPath(a.label_map, "label_map.tsv");
  LabelMapping mapping =
      label_path.empty() ? LabelMapping::Default() : LabelMapping::Load(label_path);

  Manifest gt = ReadManifest(a.gt, SplitRole::kDev);
  Predictions pred = ReadPredictions(a.pred);
  EvalConfig cfg;
  cfg.tagmap = &tagmap;
  cfg.label_map = a.no_label_map ? nullptr : &mapping;
  cfg.policy = a.strict ? ParsePolicy::kStrict : ParsePolicy::kRecover;
  cfg.jobs = a.common.jobs;
  cfg.keep_traces = !a.traces.empty();
  EvalResult res = EvalCorpus(gt, pred, cfg);

  if (a.strict && !res.diagnostics.empty()) {
    for (const EvalDiagnostic& d : res.diagnostics) {
      std::cerr << "nerkit: " << d.utt_id << " (" << d.side
                << "): " << DiagnosticName(d.diagnostic.kind) << " at token "
                << d.diagnostic.token_index << "\n";
    }
    return kExitDiagnostics;
  }
  std::map<std::string, std::string> echo = {
      {"gt", a.gt},
      {"pred", a.pred},
      {"tagmap", tagmap_path.empty() ? "<builtin>" : tagmap_path},
      {"label_map", a.no_label_map ? "<none>"
                                   : (label_path.empty() ? "<builtin>" : label_path)}};
  if (!a.traces.empty() && res.categories) {
    WriteFileOrStdout(a.traces, TraceToJsonLines(res.categories->traces));
  }
  WriteFileOrStdout(a.common.out, a.common.format == "csv"
                                      ? EvalReportToCsv(res)
                                      : EvalReportToJson(res, echo));
  return kExitOk;
}

// ---------------------------------------------------------------------------

int RunReport(const Common& c, const std::vector<std::string>& specs) {
  std::vector<LabeledReport> reports;
  for (const std::string& spec : specs) {
    auto colon = spec.find(':');
    auto eq = spec.find('=', colon == std::string::npos ? 0 : colon);
    if (colon == std::string::npos || eq == std::string::npos) {
      throw Error(ErrorKind::kUsage,
                  "--report expects METHOD:DATA_TYPE=PATH, got " + spec);
    }
    reports.push_back({spec.substr(0, colon), spec.substr(colon + 1, eq - colon - 1),
                       ReadFileOrStdin(spec.substr(eq + 1))});
  }
  auto rows = BuildReportRows(reports);
  WriteFileOrStdout(c.out, c.format == "csv" ? ReportRowsToCsv(rows)
                                             : ReportRowsToJson(rows));
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct DecodeArgs {
  Common common;
  std::vector<std::string> inputs;
  std::string lm;
  int beam = 500;
  double alpha = 1.0, beta = 0.5;
  int nbest = 1;
  bool greedy = false;
};

int RunDecode(const DecodeArgs& a) {
  TagMap tagmap = LoadTagMap(ConfigPath(a.common.tagmap, "tagmap.tsv"));
  std::unique_ptr<ArpaLm> lm;
  if (!a.lm.empty()) lm = std::make_unique<ArpaLm>(ArpaLm::Read(a.lm));
  std::vector<PosteriorMatrix> batch;
  for (const std::string& path : a.inputs) batch.push_back(ReadPosteriors(path));

  BeamOptions opt;
  opt.beam_width = a.beam;
  opt.alpha = a.alpha;
  opt.beta = a.beta;
  opt.n_best = a.nbest;
  opt.lm = lm.get();
  opt.tagmap = &tagmap;
  std::vector<std::vector<BeamResult>> results;
  if (a.greedy) {
    for (const PosteriorMatrix& p : batch) {
      BeamResult r;
      r.text = GreedyDecode(p);
      r.word_count = static_cast<int>(SplitWords(r.text).size());
      results.push_back({r});
    }
  } else {
    results = BeamDecodeBatch(batch, opt, a.common.jobs);
  }

  std::string out;
  if (a.common.format == "csv") {
    out = "# schema=nerkit.decode/1 version=" + std::string(kVersion) +
          "\ninput,rank,text,score,acoustic,lm,words\n";
    for (size_t i = 0; i < results.size(); ++i) {
      for (size_t k = 0; k < results[i].size(); ++k) {
        const BeamResult& r = results[i][k];
        out += CsvField(a.inputs[i]) + ',' + std::to_string(k + 1) + ',' +
               CsvField(r.text) + ',' + FormatDouble(r.score) + ',' +
               FormatDouble(r.acoustic) + ',' + FormatDouble(r.lm_score) + ',' +
               std::to_string(r.word_count) + '\n';
      }
    }
  } else {
    ojson j;
    j["schema"] = "nerkit.decode/1";
    j["version"] = kVersion;
    j["config"] = {{"beam", a.beam},   {"alpha", a.alpha}, {"beta", a.beta},
                   {"n_best", a.nbest}, {"greedy", a.greedy},
                   {"lm", a.lm.empty() ? "<none>" : a.lm}};
    ojson arr = ojson::array();
    for (size_t i = 0; i < results.size(); ++i) {
      ojson nbest = ojson::array();
      for (const BeamResult& r : results[i]) {
        nbest.push_back({{"text", r.text},
                         {"score", r.score},
                         {"acoustic", r.acoustic},
                         {"lm", r.lm_score},
                         {"words", r.word_count}});
      }
      arr.push_back({{"input", a.inputs[i]}, {"nbest", nbest}});
    }
    j["results"] = arr;
    out = j.dump(2) + "\n";
  }
  WriteFileOrStdout(a.common.out, out);
  return kExitOk;
}

// ---------------------------------------------------------------------------

std::vector<std::string> ReadLines(const std::string& path) {
  std::vector<std::string> lines;
  std::istringstream in(ReadFileOrStdin(path));
  std::string line;
  while (std::getline(in, line)) {
    if (!Trim(line).empty()) lines.push_back(line);
  }
  return lines;
}

struct TrainArgs {
  Common common;
  std::string corpus, arpa;
  int order = 4;
  std::string smoothing = "kn";
  bool closed = false;
};

int RunTrainLm(const TrainArgs& a) {
  LmTrainOptions opt;
  opt.order = a.order;
  opt.smoothing = a.smoothing == "wb" ? Smoothing::kWittenBell : Smoothing::kKneserNey;
  opt.closed_vocabulary = a.closed;
  opt.jobs = a.common.jobs;
  LmTrainInfo info;
  ArpaLm lm = TrainArpa(ReadLines(a.corpus), opt, &info);
  lm.Write(a.arpa);

  std::string out;
  if (a.common.format == "csv") {
    out = "# schema=nerkit.train_lm/1 version=" + std::string(kVersion) +
          "\norder,smoothing,ngrams,d1,d2,d3\n";
    for (int n = 1; n <= lm.order(); ++n) {
      const auto& d = info.discounts[n - 1];
      out += std::to_string(n) + ',' + info.smoothing_used[n - 1] + ',' +
             std::to_string(lm.table(n).size()) + ',' + FormatDouble(d[0]) + ',' +
             FormatDouble(d[1]) + ',' + FormatDouble(d[2]) + '\n';
    }
  } else {
    ojson j;
    j["schema"] = "nerkit.train_lm/1";
    j["version"] = kVersion;
    j["arpa"] = a.arpa;
    j["order"] = lm.order();
    j["vocab_size"] = lm.vocab().size();
    ojson orders = ojson::array();
    for (int n = 1; n <= lm.order(); ++n) {
      const auto& d = info.discounts[n - 1];
      orders.push_back({{"n", n},
                        {"smoothing", info.smoothing_used[n - 1]},
                        {"ngrams", lm.table(n).size()},
                        {"discounts", {d[0], d[1], d[2]}}});
    }
    j["orders"] = orders;
    out = j.dump(2) + "\n";
  }
  WriteFileOrStdout(a.common.out, out);
  return kExitOk;
}

int RunPpl(const Common& c, const std::string& lm_path, const std::string& corpus,
           bool tagged) {
  ArpaLm lm = ArpaLm::Read(lm_path);
  auto lines = ReadLines(corpus);
  if (tagged) {
    TagMap tagmap = LoadTagMap(ConfigPath(c.tagmap, "tagmap.tsv"));
    for (std::string& l : lines) l = JoinWords(LmWords(l, &tagmap));
  }
  double ppl = Perplexity(lm, lines);
  std::string out;
  if (c.format == "csv") {
    out = "# schema=nerkit.ppl/1 version=" + std::string(kVersion) +
          "\nsentences,perplexity\n" + std::to_string(lines.size()) + ',' +
          FormatDouble(ppl) + '\n';
  } else {
    ojson j;
    j["schema"] = "nerkit.ppl/1";
    j["version"] = kVersion;
    j["sentences"] = lines.size();
    j["perplexity"] = ppl;
    out = j.dump(2) + "\n";
  }
  WriteFileOrStdout(c.out, out);
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct PseudoArgs {
  Common common;
  std::string method, manifest, ftune, out_dir;
  std::string backend, transcribe, tag_text, e2e;
  MockFlags mock;
  size_t batch = 64;
};

std::set<Capability> AllCaps() {
  return {Capability::kTranscribe, Capability::kTagText, Capability::kE2eNer};
}

// "mock", "cmd:<shell command>", or "http(s)://...".
std::unique_ptr<Backend> MakeBackend(const std::string& spec,
                                     const PseudoArgs& a, const TagMap& tagmap) {
  if (spec == "mock") {
    return std::make_unique<MockBackend>(BuildMockOptions(a.mock, tagmap));
  }
  if (spec.rfind("cmd:", 0) == 0) {
    return std::make_unique<CommandBackend>(spec.substr(4), AllCaps());
  }
  if (spec.rfind("http://", 0) == 0 || spec.rfind("https://", 0) == 0) {
    return std::make_unique<HttpBackend>(spec, AllCaps());
  }
  throw Error(ErrorKind::kUsage, "unknown backend spec " + spec);
}

int RunBuildPseudo(PseudoArgs a) {
  auto method = ParseMethod(a.method);
  if (!method) throw Error(ErrorKind::kUsage, "unknown method " + a.method);
  TagMap tagmap = LoadTagMap(ConfigPath(a.common.tagmap, "tagmap.tsv"));
  Manifest external = ReadManifest(a.manifest, SplitRole::kUnspecified);
  std::optional<Manifest> ftune;
  if (!a.ftune.empty()) ftune = ReadManifest(a.ftune, SplitRole::kFineTune);

  std::vector<std::unique_ptr<Backend>> owned;
  BackendBindings bind;
  auto bindOne = [&](const std::string& spec, const Backend** slot) {
    std::string s = spec.empty() ? a.backend : spec;
    if (s.empty()) return;
    owned.push_back(MakeBackend(s, a, tagmap));
    *slot = owned.back().get();
  };
  bindOne(a.transcribe, &bind.transcribe);
  bindOne(a.tag_text, &bind.tag_text);
  bindOne(a.e2e, &bind.e2e_ner);

  MethodRunOptions opt;
  opt.tagmap = &tagmap;
  opt.batch_size = a.batch;
  opt.jobs = a.common.jobs > 0 ? a.common.jobs : 1;
  opt.ftune = ftune ? &*ftune : nullptr;
  MethodRun run = RunMethod(*method, external, bind, opt);

  std::filesystem::path dir(a.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot create " + a.out_dir);
  WriteManifest(run.pseudo, (dir / "pseudo.tsv").string());
  std::string corpus;
  for (const std::string& l : run.lm_corpus) corpus += l + '\n';
  WriteFileOrStdout((dir / "lm_corpus.txt").string(), corpus);
  if (run.merged) WriteManifest(*run.merged, (dir / "merged.tsv").string());
  WriteFileOrStdout((dir / "provenance.json").string(), ProvenanceToJson(run));
  if (!run.dropped.empty()) {
    std::cerr << "nerkit: dropped " << run.dropped.size()
              << " records after backend failures\n";
  }

  std::string out;
  if (a.common.format == "csv") {
    out = "# schema=nerkit.build_pseudo/1 version=" + std::string(kVersion) +
          "\nmethod,data_type,pseudo_records,lm_corpus_lines,dropped,collisions\n" +
          a.method + ',' + std::string(DataTypeName(run.data_type)) + ',' +
          std::to_string(run.pseudo.records.size()) + ',' +
          std::to_string(run.lm_corpus.size()) + ',' +
          std::to_string(run.dropped.size()) + ',' +
          std::to_string(run.collisions.size()) + '\n';
  } else {
    ojson j;
    j["schema"] = "nerkit.build_pseudo/1";
    j["version"] = kVersion;
    j["method"] = a.method;
    j["data_type"] = DataTypeName(run.data_type);
    j["pseudo_records"] = run.pseudo.records.size();
    j["lm_corpus_lines"] = run.lm_corpus.size();
    j["dropped"] = run.dropped.size();
    j["collisions"] = run.collisions.size();
    j["out_dir"] = a.out_dir;
    out = j.dump(2) + "\n";
  }
  WriteFileOrStdout(a.common.out, out);
  return kExitOk;
}

// ---------------------------------------------------------------------------

int RunParse(const Common& c, const std::string& input, bool strict) {
  TagMap tagmap = LoadTagMap(ConfigPath(c.tagmap, "tagmap.tsv"));
  std::istringstream in(ReadFileOrStdin(input));
  std::string line;
  int lineno = 0;
  bool any_diag = false;
  ojson lines = ojson::array();
  std::string csv = "# schema=nerkit.parse/1 version=" + std::string(kVersion) +
                    "\nline,plain_text,canonical,mentions,diagnostics\n";
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    ParsedTranscript p = ParseTagged(line, tagmap, ParsePolicy::kRecover);
    if (!p.diagnostics.empty()) {
      any_diag = true;
      if (strict) {
        std::cerr << "nerkit: line " << lineno << ": "
                  << DiagnosticName(p.diagnostics.front().kind) << "\n";
      }
    }
    std::string canonical = EncodeTagged(p.plain_text, p.mentions, tagmap);
    ojson mentions = ojson::array();
    std::string mention_str;
    for (const EntityMention& m : p.mentions) {
      mentions.push_back({{"tag", m.tag},
                          {"phrase", m.phrase},
                          {"start_word", m.start_word},
                          {"word_count", m.word_count}});
      if (!mention_str.empty()) mention_str += ';';
      mention_str += m.tag + ':' + m.phrase;
    }
    ojson diags = ojson::array();
    std::string diag_str;
    for (const ParseDiagnostic& d : p.diagnostics) {
      diags.push_back({{"kind", DiagnosticName(d.kind)}, {"token_index", d.token_index}});
      if (!diag_str.empty()) diag_str += ';';
      diag_str += std::string(DiagnosticName(d.kind));
    }
    lines.push_back({{"line", lineno},
                     {"plain_text", p.plain_text},
                     {"canonical", canonical},
                     {"mentions", mentions},
                     {"diagnostics", diags}});
    csv += std::to_string(lineno) + ',' + CsvField(p.plain_text) + ',' +
           CsvField(canonical) + ',' + CsvField(mention_str) + ',' + diag_str + '\n';
  }
  if (strict && any_diag) return kExitDiagnostics;
  if (c.format == "csv") {
    WriteFileOrStdout(c.out, csv);
  } else {
    ojson j;
    j["schema"] = "nerkit.parse/1";
    j["version"] = kVersion;
    j["lines"] = lines;
    WriteFileOrStdout(c.out, j.dump(2) + "\n");
  }
  return kExitOk;
}

int Main(int argc, char** argv) {
  CLI::App app{"nerkit: spoken NER evaluation, decoding and pseudo-labeling"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  EvalArgs ev;
  auto* eval = app.add_subcommand("eval", "score predictions against ground truth");
  AddCommon(eval, &ev.common);
  AddPolicy(eval, &ev.strict);
  eval->add_option("--gt", ev.gt, "ground-truth manifest")->required();
  eval->add_option("--pred", ev.pred, "predictions (manifest or id<TAB>text)")
      ->required();
  eval->add_option("--label-map", ev.label_map, "fine -> combined tag map");
  eval->add_flag("--no-label-map", ev.no_label_map, "score tags as written");
  eval->add_option("--traces", ev.traces, "write per-entity category traces");

  Common rep_common;
  std::vector<std::string> rep_specs;
  auto* report = app.add_subcommand("report", "tabulate labeled eval reports");
  AddCommon(report, &rep_common);
  report->add_option("--report", rep_specs, "METHOD:DATA_TYPE=eval.json")
      ->required();

  DecodeArgs dec;
  auto* decode = app.add_subcommand("decode", "CTC beam search over posteriors");
  AddCommon(decode, &dec.common);
  decode->add_option("inputs", dec.inputs, "posterior files")->required();
  decode->add_option("--lm", dec.lm, "ARPA language model");
  decode->add_option("--beam", dec.beam, "beam width")->check(CLI::PositiveNumber);
  decode->add_option("--alpha", dec.alpha, "LM weight");
  decode->add_option("--beta", dec.beta, "word insertion bonus");
  decode->add_option("--nbest", dec.nbest, "hypotheses per input")
      ->check(CLI::PositiveNumber);
  decode->add_flag("--greedy", dec.greedy, "best-path decoding");

  TrainArgs tr;
  auto* train = app.add_subcommand("train-lm", "train an ARPA n-gram LM");
  AddCommon(train, &tr.common);
  train->add_option("--corpus", tr.corpus, "one sentence per line")->required();
  train->add_option("--arpa", tr.arpa, "output ARPA file")->required();
  train->add_option("--order", tr.order, "n-gram order")->check(CLI::Range(1, 9));
  train->add_option("--smoothing", tr.smoothing, "kn or wb")
      ->check(CLI::IsMember({"kn", "wb"}));
  train->add_flag("--closed-vocab", tr.closed, "no <unk> mass");

  Common ppl_common;
  std::string ppl_lm, ppl_corpus;
  bool ppl_tagged = false;
  auto* ppl = app.add_subcommand("ppl", "perplexity of a corpus");
  AddCommon(ppl, &ppl_common);
  ppl->add_option("--lm", ppl_lm, "ARPA language model")->required();
  ppl->add_option("--corpus", ppl_corpus, "one sentence per line")->required();
  ppl->add_flag("--tagged", ppl_tagged, "split tag characters into LM words");

  PseudoArgs ps;
  auto* pseudo = app.add_subcommand("build-pseudo", "run a pseudo-labeling method");
  AddCommon(pseudo, &ps.common);
  pseudo->add_option("--method", ps.method, "method name")->required();
  pseudo->add_option("--manifest", ps.manifest, "external data manifest")->required();
  pseudo->add_option("--out-dir", ps.out_dir, "output directory")->required();
  pseudo->add_option("--ftune", ps.ftune, "fine-tune manifest to merge");
  pseudo->add_option("--backend", ps.backend, "backend for every capability");
  pseudo->add_option("--transcribe", ps.transcribe, "transcribe backend");
  pseudo->add_option("--tag-text", ps.tag_text, "tag_text backend");
  pseudo->add_option("--e2e", ps.e2e, "e2e_ner backend");
  pseudo->add_option("--batch", ps.batch, "records per backend call")
      ->check(CLI::PositiveNumber);
  pseudo->add_option("--seed", ps.mock.seed, "mock backend seed");
  pseudo->add_option("--mock-refs", ps.mock.refs, "mock hidden references");
  pseudo->add_option("--mock-gazetteer", ps.mock.gazetteer, "mock gazetteer");
  pseudo->add_option("--mock-noise", ps.mock.noise, "mock total word error rate");
  pseudo->add_option("--mock-fail", ps.mock.fail, "mock per-record failure rate");

  Common parse_common;
  std::string parse_input = "-";
  bool parse_strict = false;
  auto* parse = app.add_subcommand("parse", "parse tagged transcripts");
  AddCommon(parse, &parse_common);
  AddPolicy(parse, &parse_strict);
  parse->add_option("--input", parse_input, "tagged lines (- for stdin)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*eval) return RunEval(ev);
    if (*report) return RunReport(rep_common, rep_specs);
    if (*decode) return RunDecode(dec);
    if (*train) return RunTrainLm(tr);
    if (*ppl) return RunPpl(ppl_common, ppl_lm, ppl_corpus, ppl_tagged);
    if (*pseudo) return RunBuildPseudo(ps);
    if (*parse) return RunParse(parse_common, parse_input, parse_strict);
  } catch (const Error& e) {
    std::cerr << "nerkit: " << e.what() << "\n";
    return ExitCodeFor(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "nerkit: " << e.what() << "\n";
    return kExitDataErr;
  }
  return kExitUsage;
}

}  // namespace
}  // namespace nerkit::tools

int main(int argc, char** argv) { return nerkit::tools::Main(argc, argv); }
