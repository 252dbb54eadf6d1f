// src/corpus_eval.cc

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

#include "nerkit/corpus_eval.h"

#include <omp.h>

#include <exception>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "nerkit/error.h"
#include "nerkit/text_util.h"
#include "nerkit/version.h"

namespace nerkit {

namespace {

constexpr std::string_view kManifestHeaderPrefix = "utt_id\taudio_ref\t";

struct UttEval {
  TupleMatchResult match;
  WerStats wer;
  NeAccStats ne;
  UtteranceTrace trace;
  std::vector<EvalDiagnostic> diagnostics;
  bool missing = false;
};

// Lowercased plain text and mentions of the reference side.
ParsedTranscript GtLabels(const ManifestRecord& r, const TagMap& tagmap) {
  if (!r.tagged_text.empty()) {
    return ParseTagged(ToLowerAscii(r.tagged_text), tagmap, ParsePolicy::kRecover);
  }
  ParsedTranscript p;
  p.plain_text = CollapseWhitespace(ToLowerAscii(r.text));
  if (r.mentions) {
    p.mentions = *r.mentions;
    for (EntityMention& m : p.mentions) m.phrase = ToLowerAscii(m.phrase);
  }
  return p;
}

UttEval EvalOne(const ManifestRecord& r, const Predictions& pred,
                const TagMap& tagmap, const LabelMapping* mapping) {
  UttEval u;
  u.trace.utt_id = r.utt_id;
  ParsedTranscript gt = GtLabels(r, tagmap);
  for (const ParseDiagnostic& d : gt.diagnostics) {
    u.diagnostics.push_back({r.utt_id, "gt", d});
  }
  auto it = pred.find(r.utt_id);
  u.missing = it == pred.end();
  ParsedTranscript hyp = ParseTagged(
      u.missing ? std::string() : ToLowerAscii(it->second), tagmap,
      ParsePolicy::kRecover);
  for (const ParseDiagnostic& d : hyp.diagnostics) {
    u.diagnostics.push_back({r.utt_id, "pred", d});
  }
  if (mapping) {
    gt.mentions = MapLabels(gt.mentions, *mapping);
    hyp.mentions = MapLabels(hyp.mentions, *mapping);
  }

  u.match = MatchTuples(ToTuples(gt.mentions), ToTuples(hyp.mentions));
  auto ref_words = SplitWords(gt.plain_text);
  auto hyp_words = SplitWords(hyp.plain_text);
  u.wer = ComputeWerStats(ref_words, hyp_words);
  u.ne = ComputeNeAccStats(ref_words, gt.mentions, hyp_words);
  u.trace.entities =
      Categorize(gt.plain_text, gt.mentions, hyp.plain_text, hyp.mentions);
  return u;
}

EvalResult Fold(std::vector<UttEval>& per_utt, const EvalConfig& config) {
  EvalResult res;
  res.policy = config.policy;
  res.mapped_labels = config.label_map != nullptr;
  std::vector<UtteranceTrace> traces;
  traces.reserve(per_utt.size());
  for (UttEval& u : per_utt) {
    ++res.utterances;
    res.missing_predictions += u.missing;
    res.prf_counts += u.match;
    res.wer_stats += u.wer;
    res.ne_acc_stats += u.ne;
    for (EvalDiagnostic& d : u.diagnostics) res.diagnostics.push_back(std::move(d));
    traces.push_back(std::move(u.trace));
  }
  res.prf = MicroPrf(res.prf_counts);
  if (res.wer_stats.ref_words > 0) res.wer = res.wer_stats.Rate();
  long long gt_entities = res.prf_counts.true_positive + res.prf_counts.false_negative;
  if (gt_entities > 0) {
    res.categories = Aggregate(std::move(traces));
    if (!config.keep_traces) res.categories->traces.clear();
  }
  return res;
}

const TagMap& MapOf(const EvalConfig& c) {
  return c.tagmap ? *c.tagmap : TagMap::Default();
}

nlohmann::ordered_json OptionalNumber(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

}  // namespace

Predictions ParsePredictions(std::string_view contents) {
  Predictions out;
  if (contents.substr(0, kManifestHeaderPrefix.size()) == kManifestHeaderPrefix) {
    Manifest m = ParseManifest(contents, SplitRole::kUnspecified);
    for (const ManifestRecord& r : m.records) {
      out[r.utt_id] = r.tagged_text.empty() ? r.text : r.tagged_text;
    }
    return out;
  }
  std::istringstream in{std::string(contents)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (Trim(line).empty()) continue;
    auto tab = line.find('\t');
    std::string id = std::string(Trim(line.substr(0, tab)));
    std::string text = tab == std::string::npos ? "" : line.substr(tab + 1);
    if (id.empty() || !out.emplace(id, text).second) {
      throw Error(ErrorKind::kInvalidManifest,
                  "predictions line " + std::to_string(lineno) +
                      ": empty or duplicate utt_id");
    }
  }
  return out;
}

Predictions ReadPredictions(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open predictions " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ParsePredictions(ss.str());
}

EvalResult EvalCorpusSerial(const Manifest& gt, const Predictions& pred,
                            const EvalConfig& config) {
  std::vector<UttEval> per_utt;
  per_utt.reserve(gt.records.size());
  for (const ManifestRecord& r : gt.records) {
    per_utt.push_back(EvalOne(r, pred, MapOf(config), config.label_map));
  }
  return Fold(per_utt, config);
}

EvalResult EvalCorpus(const Manifest& gt, const Predictions& pred,
                      const EvalConfig& config) {
  const long long n = static_cast<long long>(gt.records.size());
  std::vector<UttEval> per_utt(n);
  std::vector<std::exception_ptr> errors(n);
  const int threads = config.jobs > 0 ? config.jobs : omp_get_max_threads();
  const TagMap& tagmap = MapOf(config);
#pragma omp parallel for schedule(dynamic, 16) num_threads(threads)
  for (long long i = 0; i < n; ++i) {
    try {
      per_utt[i] = EvalOne(gt.records[i], pred, tagmap, config.label_map);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return Fold(per_utt, config);
}

std::string EvalReportToJson(const EvalResult& r,
                             const std::map<std::string, std::string>& config_echo) {
  nlohmann::ordered_json j;
  j["schema"] = "nerkit.eval/1";
  j["version"] = kVersion;
  nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
  for (const auto& [k, v] : config_echo) cfg[k] = v;
  cfg["policy"] = r.policy == ParsePolicy::kStrict ? "strict" : "recover";
  cfg["label_mapping"] = r.mapped_labels;
  j["config"] = cfg;
  j["utterances"] = r.utterances;
  j["missing_predictions"] = r.missing_predictions;
  j["precision"] = r.prf.precision;
  j["recall"] = r.prf.recall;
  j["f1"] = r.prf.f1;
  j["prf_degenerate"] = r.prf.degenerate;
  j["wer"] = OptionalNumber(r.wer);
  j["ne_acc"] = OptionalNumber(r.ne_acc_stats.Rate());
  nlohmann::ordered_json counts;
  counts["true_positive"] = r.prf_counts.true_positive;
  counts["false_positive"] = r.prf_counts.false_positive;
  counts["false_negative"] = r.prf_counts.false_negative;
  counts["ref_words"] = r.wer_stats.ref_words;
  counts["substitutions"] = r.wer_stats.substitutions;
  counts["deletions"] = r.wer_stats.deletions;
  counts["insertions"] = r.wer_stats.insertions;
  counts["ne_accurate"] = r.ne_acc_stats.accurate;
  counts["ne_total"] = r.ne_acc_stats.total;
  counts["diagnostics"] = r.diagnostics.size();
  j["counts"] = counts;
  if (r.categories) {
    nlohmann::ordered_json cats;
    cats["total_gt"] = r.categories->total_gt;
    for (ErrorCategory c : kAllErrorCategories) {
      cats[std::string(CategoryName(c))] = {{"count", r.categories->Count(c)},
                                            {"rate", r.categories->Rate(c)}};
    }
    j["categories"] = cats;
  } else {
    j["categories"] = nullptr;
  }
  nlohmann::ordered_json diags = nlohmann::ordered_json::array();
  for (const EvalDiagnostic& d : r.diagnostics) {
    diags.push_back({{"utt_id", d.utt_id},
                     {"side", d.side},
                     {"kind", DiagnosticName(d.diagnostic.kind)},
                     {"token_index", d.diagnostic.token_index}});
  }
  j["diagnostics"] = diags;
  return j.dump(2) + "\n";
}

std::string EvalReportToCsv(const EvalResult& r) {
  std::string out = "# schema=nerkit.eval/1 version=" + std::string(kVersion) +
                    "\nmetric,value\n";
  auto row = [&out](std::string_view name, const std::string& value) {
    out += std::string(name) + ',' + value + '\n';
  };
  auto opt = [](const std::optional<double>& v) {
    return v ? FormatDouble(*v) : std::string("n/a");
  };
  row("utterances", std::to_string(r.utterances));
  row("precision", FormatDouble(r.prf.precision));
  row("recall", FormatDouble(r.prf.recall));
  row("f1", FormatDouble(r.prf.f1));
  row("prf_degenerate", r.prf.degenerate ? "true" : "false");
  row("wer", opt(r.wer));
  row("ne_acc", opt(r.ne_acc_stats.Rate()));
  row("true_positive", std::to_string(r.prf_counts.true_positive));
  row("false_positive", std::to_string(r.prf_counts.false_positive));
  row("false_negative", std::to_string(r.prf_counts.false_negative));
  row("diagnostics", std::to_string(r.diagnostics.size()));
  if (r.categories) {
    for (ErrorCategory c : kAllErrorCategories) {
      row("rate_" + std::string(CategoryName(c)), FormatDouble(r.categories->Rate(c)));
    }
  }
  return out;
}

}  // namespace nerkit
