// src/pseudolabel.cc

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

#include "nerkit/pseudolabel.h"

#include <algorithm>
#include <cstdlib>
#include <ctime>
#include <map>
#include <set>

#include "json.hpp"
#include "nerkit/error.h"
#include "nerkit/text_util.h"

namespace nerkit {

namespace {

const std::map<Method, MethodInfo>& MethodTable() {
  using C = Capability;
  static const std::map<Method, MethodInfo> table = {
      {Method::kSelfTrainAsr,
       {DataType::kUnSp, "ASR", "ASR", "n/a", {C::kTranscribe}}},
      {Method::kSelfTrainTxtNer,
       {DataType::kUnTxt, "text NER", "text NER", "n/a", {C::kTagText}}},
      {Method::kPreAsr, {DataType::kSpTxt, "n/a", "ASR", "ftune 4-gram", {}}},
      {Method::kSelfTrainE2e,
       {DataType::kUnSp, "E2E-NER", "E2E-NER", "pLabel 4-gram", {C::kE2eNer}}},
      {Method::kDistillPipeline,
       {DataType::kUnSp, "Pipeline-NER", "E2E-NER", "pLabel 4-gram",
        {C::kTranscribe, C::kTagText}}},
      {Method::kDistillTxtNerLm,
       {DataType::kUnTxt, "text NER", "n/a", "pLabel 4-gram", {C::kTagText}}},
      {Method::kDistillTxtNer,
       {DataType::kSpTxt, "text NER", "E2E-NER", "pLabel 4-gram", {C::kTagText}}},
  };
  return table;
}

constexpr std::pair<Method, std::string_view> kMethodNames[] = {
    {Method::kSelfTrainAsr, "SelfTrain-ASR"},
    {Method::kSelfTrainTxtNer, "SelfTrain-txtNER"},
    {Method::kPreAsr, "Pre-ASR"},
    {Method::kSelfTrainE2e, "SelfTrain-E2E"},
    {Method::kDistillPipeline, "Distill-Pipeline"},
    {Method::kDistillTxtNerLm, "Distill-txtNER-lm"},
    {Method::kDistillTxtNer, "Distill-txtNER"},
};

// Plain input text of a record carrying text.
std::string RecordText(const ManifestRecord& r, const TagMap& tagmap) {
  if (!r.text.empty()) return CollapseWhitespace(r.text);
  return StripTags(r.tagged_text, tagmap);
}

// Runs one capability over (id, input) pairs; failed ids go to `dropped`.
std::vector<std::optional<std::string>> Label(
    const BackendBindings& backends, Capability cap,
    const std::vector<BackendRequest>& requests, const MethodRunOptions& opt,
    MethodRun* run) {
  const Backend* backend = backends.For(cap);
  auto out = InvokeBatched(*backend, cap, requests, opt.batch_size, opt.jobs);
  for (size_t i = 0; i < out.size(); ++i) {
    if (!out[i]) run->dropped.push_back(requests[i].id);
  }
  return out;
}

// Canonicalizes a tagged model output into a pseudo record.
ManifestRecord TaggedRecord(const std::string& utt_id,
                            const std::string& audio_ref,
                            const std::string& tagged, const TagMap& tagmap,
                            MethodRun* run) {
  ParsedTranscript p = ParseTagged(tagged, tagmap, ParsePolicy::kRecover);
  ManifestRecord r;
  r.utt_id = utt_id;
  r.audio_ref = audio_ref;
  r.text = p.plain_text;
  r.tagged_text = EncodeTagged(p.plain_text, p.mentions, tagmap);
  r.mentions = p.mentions;
  run->records.push_back({utt_id, std::move(p.diagnostics)});
  return r;
}

}  // namespace

std::string_view MethodName(Method m) {
  for (auto [method, name] : kMethodNames) {
    if (method == m) return name;
  }
  return "?";
}

std::optional<Method> ParseMethod(std::string_view name) {
  for (auto [method, n] : kMethodNames) {
    if (n == name) return method;
  }
  return std::nullopt;
}

const MethodInfo& GetMethodInfo(Method m) { return MethodTable().at(m); }

void CheckCompatible(Method m, const Manifest& manifest) {
  DataType have;
  try {
    have = InferDataType(manifest);
  } catch (const Error& e) {
    throw Error(ErrorKind::kIncompatibleMethod,
                std::string(MethodName(m)) + ": " + e.what());
  }
  DataType need = RequiredDataType(m);
  if (have != need) {
    throw Error(ErrorKind::kIncompatibleMethod,
                std::string(MethodName(m)) + " needs " +
                    std::string(DataTypeName(need)) + " data, manifest is " +
                    std::string(DataTypeName(have)));
  }
}

const Backend* BackendBindings::For(Capability c) const {
  switch (c) {
    case Capability::kTranscribe: return transcribe;
    case Capability::kTagText: return tag_text;
    case Capability::kE2eNer: return e2e_ner;
  }
  return nullptr;
}

std::string ProvenanceTimestamp() {
  std::time_t t = std::time(nullptr);
  if (const char* sde = std::getenv("SOURCE_DATE_EPOCH")) {
    t = static_cast<std::time_t>(std::strtoll(sde, nullptr, 10));
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

MethodRun RunMethod(Method method, const Manifest& external,
                    const BackendBindings& backends,
                    const MethodRunOptions& options) {
  const MethodInfo& info = GetMethodInfo(method);
  CheckCompatible(method, external);
  for (Capability c : info.capabilities) {
    const Backend* b = backends.For(c);
    if (b == nullptr || !b->Supports(c)) {
      throw Error(ErrorKind::kIncompatibleMethod,
                  std::string(MethodName(method)) + " needs a backend with " +
                      std::string(CapabilityName(c)));
    }
  }
  const TagMap& tagmap = options.tagmap ? *options.tagmap : TagMap::Default();

  MethodRun run;
  run.method = method;
  run.data_type = info.data_type;
  run.pseudo.role = SplitRole::kPseudo;
  run.started = ProvenanceTimestamp();
  for (Capability c : info.capabilities) {
    run.backends.emplace_back(std::string(CapabilityName(c)),
                              backends.For(c)->identity());
  }

  const auto& recs = external.records;
  std::vector<BackendRequest> audio_requests, text_requests;
  for (const ManifestRecord& r : recs) {
    audio_requests.push_back({r.utt_id, r.audio_ref});
    if (r.HasText()) text_requests.push_back({r.utt_id, RecordText(r, tagmap)});
  }

  switch (method) {
    case Method::kSelfTrainAsr: {
      auto out = Label(backends, Capability::kTranscribe, audio_requests,
                       options, &run);
      for (size_t i = 0; i < recs.size(); ++i) {
        if (!out[i]) continue;
        ManifestRecord r;
        r.utt_id = recs[i].utt_id;
        r.audio_ref = recs[i].audio_ref;
        r.text = CollapseWhitespace(*out[i]);
        run.records.push_back({r.utt_id, {}});
        run.pseudo.records.push_back(std::move(r));
      }
      break;
    }
    case Method::kPreAsr: {
      // Transfer: transcribed speech passes through unlabeled.
      for (const ManifestRecord& in : recs) {
        ManifestRecord r;
        r.utt_id = in.utt_id;
        r.audio_ref = in.audio_ref;
        r.text = RecordText(in, tagmap);
        run.records.push_back({r.utt_id, {}});
        run.pseudo.records.push_back(std::move(r));
      }
      if (options.ftune) {
        for (const ManifestRecord& f : options.ftune->records) {
          if (!f.HasText()) continue;
          ParsedTranscript p = RecordLabels(f, tagmap, ParsePolicy::kRecover);
          run.lm_corpus.push_back(EncodeTagged(p.plain_text, p.mentions, tagmap));
        }
      }
      break;
    }
    case Method::kSelfTrainE2e: {
      auto out =
          Label(backends, Capability::kE2eNer, audio_requests, options, &run);
      for (size_t i = 0; i < recs.size(); ++i) {
        if (!out[i]) continue;
        run.pseudo.records.push_back(
            TaggedRecord(recs[i].utt_id, recs[i].audio_ref, *out[i], tagmap, &run));
      }
      break;
    }
    case Method::kDistillPipeline: {
      auto asr = Label(backends, Capability::kTranscribe, audio_requests,
                       options, &run);
      std::vector<BackendRequest> second;
      std::vector<size_t> source;
      for (size_t i = 0; i < recs.size(); ++i) {
        if (!asr[i]) continue;
        second.push_back({recs[i].utt_id, CollapseWhitespace(*asr[i])});
        source.push_back(i);
      }
      auto ner = Label(backends, Capability::kTagText, second, options, &run);
      for (size_t k = 0; k < second.size(); ++k) {
        if (!ner[k]) continue;
        const ManifestRecord& in = recs[source[k]];
        run.pseudo.records.push_back(
            TaggedRecord(in.utt_id, in.audio_ref, *ner[k], tagmap, &run));
      }
      break;
    }
    case Method::kSelfTrainTxtNer:
    case Method::kDistillTxtNerLm:
    case Method::kDistillTxtNer: {
      auto out =
          Label(backends, Capability::kTagText, text_requests, options, &run);
      for (size_t i = 0; i < recs.size(); ++i) {
        if (!out[i]) continue;
        std::string audio =
            method == Method::kDistillTxtNer ? recs[i].audio_ref : std::string();
        ManifestRecord r =
            TaggedRecord(recs[i].utt_id, audio, *out[i], tagmap, &run);
        if (method == Method::kDistillTxtNerLm) {
          run.lm_corpus.push_back(r.tagged_text);
        } else {
          run.pseudo.records.push_back(std::move(r));
        }
      }
      break;
    }
  }

  if (info.lm == "pLabel 4-gram" && method != Method::kDistillTxtNerLm) {
    for (const ManifestRecord& r : run.pseudo.records) {
      run.lm_corpus.push_back(r.tagged_text);
    }
  }
  if (options.ftune && info.target_model != "n/a") {
    run.merged = MergeDatasets(*options.ftune, run.pseudo, &run.collisions);
  }
  run.finished = ProvenanceTimestamp();
  return run;
}

Manifest MergeDatasets(const Manifest& ftune, const Manifest& pseudo,
                       std::vector<std::string>* collisions) {
  Manifest out;
  out.role = SplitRole::kMerged;
  std::set<std::string> seen;
  for (const ManifestRecord& r : ftune.records) {
    seen.insert(r.utt_id);
    out.records.push_back(r);
  }
  std::vector<const ManifestRecord*> rest;
  for (const ManifestRecord& r : pseudo.records) rest.push_back(&r);
  std::stable_sort(rest.begin(), rest.end(),
                   [](const ManifestRecord* a, const ManifestRecord* b) {
                     return a->utt_id < b->utt_id;
                   });
  for (const ManifestRecord* r : rest) {
    if (seen.count(r->utt_id)) {
      if (collisions) collisions->push_back(r->utt_id);
      continue;
    }
    seen.insert(r->utt_id);
    out.records.push_back(*r);
  }
  return out;
}

std::string ProvenanceToJson(const MethodRun& run) {
  const MethodInfo& info = GetMethodInfo(run.method);
  nlohmann::ordered_json j;
  j["schema"] = "nerkit.provenance/1";
  j["method"] = MethodName(run.method);
  j["data_type"] = DataTypeName(run.data_type);
  j["labeling_model"] = info.labeling_model;
  j["target_model"] = info.target_model;
  j["lm"] = info.lm;
  j["transfer"] = info.labeling_model == "n/a";
  nlohmann::ordered_json b = nlohmann::ordered_json::object();
  for (const auto& [cap, id] : run.backends) b[cap] = id;
  j["backends"] = b;
  j["started"] = run.started;
  j["finished"] = run.finished;
  j["pseudo_records"] = run.pseudo.records.size();
  j["lm_corpus_lines"] = run.lm_corpus.size();
  j["dropped_count"] = run.dropped.size();
  j["dropped"] = run.dropped;
  j["merge_collisions"] = run.collisions;
  if (run.merged) j["merged_records"] = run.merged->records.size();
  long long diag_total = 0;
  nlohmann::ordered_json recs = nlohmann::ordered_json::array();
  for (const RecordProvenance& p : run.records) {
    nlohmann::ordered_json r;
    r["utt_id"] = p.utt_id;
    nlohmann::ordered_json d = nlohmann::ordered_json::array();
    for (const ParseDiagnostic& diag : p.diagnostics) {
      d.push_back({{"kind", DiagnosticName(diag.kind)},
                   {"token_index", diag.token_index}});
    }
    diag_total += static_cast<long long>(p.diagnostics.size());
    r["diagnostics"] = d;
    recs.push_back(std::move(r));
  }
  j["diagnostic_count"] = diag_total;
  j["records"] = recs;
  return j.dump(2) + "\n";
}

}  // namespace nerkit
