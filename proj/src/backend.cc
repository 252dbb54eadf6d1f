// src/backend.cc

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

#include "nerkit/backend.h"

#include <unistd.h>

#include <atomic>
#include <exception>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "httplib.h"
#include "json.hpp"
#include "nerkit/error.h"
#include "nerkit/text_util.h"

namespace nerkit {

std::string_view CapabilityName(Capability c) {
  switch (c) {
    case Capability::kTranscribe: return "transcribe";
    case Capability::kTagText: return "tag_text";
    case Capability::kE2eNer: return "e2e_ner";
  }
  return "?";
}

std::optional<Capability> ParseCapability(std::string_view name) {
  for (Capability c : {Capability::kTranscribe, Capability::kTagText,
                       Capability::kE2eNer}) {
    if (CapabilityName(c) == name) return c;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Wire format

std::string EncodeRequests(const std::vector<BackendRequest>& requests) {
  std::string out;
  for (const BackendRequest& r : requests) {
    nlohmann::ordered_json j;
    j["id"] = r.id;
    j["in"] = r.in;
    out += j.dump() + '\n';
  }
  return out;
}

std::string EncodeResponses(const std::vector<BackendResponse>& responses) {
  std::string out;
  for (const BackendResponse& r : responses) {
    nlohmann::ordered_json j;
    j["id"] = r.id;
    j["in"] = r.in;
    j["out"] = r.out;
    j["ok"] = r.ok;
    out += j.dump() + '\n';
  }
  return out;
}

namespace {

template <typename Fn>
void ForEachJsonLine(std::string_view ndjson, bool lenient, Fn&& fn) {
  std::istringstream in{std::string(ndjson)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (Trim(line).empty()) continue;
    try {
      fn(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception& e) {
      if (lenient) continue;
      throw Error(ErrorKind::kBackendFailure,
                  "bad wire record on line " + std::to_string(lineno) + ": " +
                      e.what());
    }
  }
}

std::vector<BackendResponse> DecodeResponsesImpl(std::string_view ndjson,
                                                 bool lenient) {
  std::vector<BackendResponse> out;
  ForEachJsonLine(ndjson, lenient, [&out](const nlohmann::json& j) {
    BackendResponse r;
    r.id = j.at("id").get<std::string>();
    r.in = j.value("in", std::string());
    r.out = j.value("out", std::string());
    r.ok = j.value("ok", false);
    out.push_back(std::move(r));
  });
  return out;
}

}  // namespace

std::vector<BackendRequest> DecodeRequests(std::string_view ndjson) {
  std::vector<BackendRequest> out;
  ForEachJsonLine(ndjson, false, [&out](const nlohmann::json& j) {
    out.push_back({j.at("id").get<std::string>(), j.at("in").get<std::string>()});
  });
  return out;
}

std::vector<BackendResponse> DecodeResponses(std::string_view ndjson) {
  return DecodeResponsesImpl(ndjson, false);
}

// ---------------------------------------------------------------------------
// Noise channel and gazetteer

namespace {

// Confusion words used for substitutions and insertions.
constexpr std::string_view kFillers[] = {
    "uh",   "um",   "the",  "a",    "and",  "of",   "to",   "in",
    "that", "this", "it",   "is",   "for",  "on",   "was",  "with"};
constexpr size_t kNumFillers = sizeof(kFillers) / sizeof(kFillers[0]);

class DeterministicStream {
 public:
  DeterministicStream(uint64_t seed, std::string_view key, std::string_view salt)
      : engine_(Fnv1a64(key, Fnv1a64(salt, seed ^ 0x6a09e667f3bcc909ULL))) {}

  double Uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  size_t Index(size_t n) { return static_cast<size_t>(engine_() % n); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace

std::vector<std::string> ApplyNoiseChannel(const std::vector<std::string>& words,
                                           const NoiseModel& noise,
                                           uint64_t seed, std::string_view key,
                                           NoiseCounts* counts) {
  DeterministicStream rng(seed, key, "noise");
  std::vector<std::string> out;
  out.reserve(words.size() + 4);
  NoiseCounts local;
  for (const std::string& w : words) {
    ++local.words;
    double u = rng.Uniform();
    if (u < noise.sub_rate) {
      size_t k = rng.Index(kNumFillers);
      if (kFillers[k] == w) k = (k + 1) % kNumFillers;
      out.emplace_back(kFillers[k]);
      ++local.substituted;
    } else if (u < noise.sub_rate + noise.del_rate) {
      ++local.deleted;
    } else if (u < noise.sub_rate + noise.del_rate + noise.ins_rate) {
      out.push_back(w);
      out.emplace_back(kFillers[rng.Index(kNumFillers)]);
      ++local.inserted;
    } else {
      out.push_back(w);
    }
  }
  if (counts) {
    counts->words += local.words;
    counts->substituted += local.substituted;
    counts->deleted += local.deleted;
    counts->inserted += local.inserted;
  }
  return out;
}

Gazetteer::Gazetteer(std::vector<std::pair<std::string, std::string>> entries) {
  for (auto& [phrase, tag] : entries) {
    auto words = SplitWords(phrase);
    if (words.empty()) continue;
    max_len_ = std::max(max_len_, words.size());
    by_phrase_[std::move(words)] = tag;
  }
}

Gazetteer Gazetteer::Parse(std::string_view contents) {
  std::vector<std::pair<std::string, std::string>> entries;
  std::istringstream in{std::string(contents)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (Trim(line).empty() || Trim(line).front() == '#') continue;
    auto fields = SplitFields(line, '\t');
    if (fields.size() != 2) {
      throw Error(ErrorKind::kUsage, "gazetteer line " + std::to_string(lineno) +
                                         ": expected phrase<TAB>TAG");
    }
    entries.emplace_back(fields[0], std::string(Trim(fields[1])));
  }
  return Gazetteer(std::move(entries));
}

Gazetteer Gazetteer::FromTagged(const std::vector<std::string>& tagged,
                                const TagMap& tagmap) {
  std::vector<std::pair<std::string, std::string>> entries;
  for (const std::string& t : tagged) {
    for (const EntityMention& m :
         ParseTagged(t, tagmap, ParsePolicy::kRecover).mentions) {
      entries.emplace_back(m.phrase, m.tag);
    }
  }
  return Gazetteer(std::move(entries));
}

Gazetteer Gazetteer::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open gazetteer " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return Parse(ss.str());
}

std::vector<EntityMention> Gazetteer::Tag(
    const std::vector<std::string>& words) const {
  std::vector<EntityMention> mentions;
  size_t i = 0;
  while (i < words.size()) {
    size_t matched = 0;
    for (size_t len = std::min(max_len_, words.size() - i); len >= 1; --len) {
      std::vector<std::string> key(words.begin() + i, words.begin() + i + len);
      auto it = by_phrase_.find(key);
      if (it != by_phrase_.end()) {
        mentions.push_back({it->second, JoinWords(key), static_cast<int>(i),
                            static_cast<int>(len)});
        matched = len;
        break;
      }
    }
    i += matched > 0 ? matched : 1;
  }
  return mentions;
}

// ---------------------------------------------------------------------------
// MockBackend

MockBackend::MockBackend(MockBackendOptions options) : opt_(std::move(options)) {
  const NoiseModel& n = opt_.noise;
  for (double r : {n.sub_rate, n.del_rate, n.ins_rate, opt_.failure_rate}) {
    if (!(r >= 0.0 && r < 1.0)) {
      throw Error(ErrorKind::kUsage, "mock rates must lie in [0,1)");
    }
  }
  if (n.sub_rate + n.del_rate + n.ins_rate >= 1.0) {
    throw Error(ErrorKind::kUsage, "mock noise rates must sum to less than 1");
  }
}

std::string MockBackend::identity() const {
  return "mock:seed=" + std::to_string(opt_.seed) +
         ",sub=" + FormatDouble(opt_.noise.sub_rate) +
         ",del=" + FormatDouble(opt_.noise.del_rate) +
         ",ins=" + FormatDouble(opt_.noise.ins_rate) +
         ",fail=" + FormatDouble(opt_.failure_rate);
}

std::optional<std::string> MockBackend::Transcribe(const std::string& utt_id) const {
  auto it = opt_.hidden_refs.find(utt_id);
  if (it == opt_.hidden_refs.end()) return std::nullopt;
  auto noisy = ApplyNoiseChannel(SplitWords(it->second), opt_.noise, opt_.seed,
                                 utt_id);
  return JoinWords(noisy);
}

std::string MockBackend::TagText(const std::string& text) const {
  auto words = SplitWords(text);
  std::vector<EntityMention> mentions;
  for (EntityMention& m : opt_.gazetteer.Tag(words)) {
    if (opt_.tagmap.OpenCharFor(m.tag)) mentions.push_back(std::move(m));
  }
  return EncodeTagged(JoinWords(words), mentions, opt_.tagmap);
}

std::vector<BackendResponse> MockBackend::Invoke(
    Capability capability, const std::vector<BackendRequest>& requests) const {
  if (!Supports(capability)) {
    throw Error(ErrorKind::kBackendFailure,
                identity() + " lacks capability " +
                    std::string(CapabilityName(capability)));
  }
  std::vector<BackendResponse> out;
  out.reserve(requests.size());
  for (const BackendRequest& req : requests) {
    BackendResponse r{req.id, req.in, "", false};
    DeterministicStream fail(opt_.seed, req.id, CapabilityName(capability));
    if (opt_.failure_rate > 0.0 && fail.Uniform() < opt_.failure_rate) {
      out.push_back(std::move(r));
      continue;
    }
    switch (capability) {
      case Capability::kTranscribe:
        if (auto t = Transcribe(req.id)) {
          r.out = *t;
          r.ok = true;
        }
        break;
      case Capability::kTagText:
        r.out = TagText(req.in);
        r.ok = true;
        break;
      case Capability::kE2eNer:
        if (auto t = Transcribe(req.id)) {
          r.out = TagText(*t);
          r.ok = true;
        }
        break;
    }
    out.push_back(std::move(r));
  }
  return out;
}

// ---------------------------------------------------------------------------
// CommandBackend

namespace {

std::string ShellQuote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  return out + "'";
}

std::filesystem::path TempPath(std::string_view suffix) {
  static std::atomic<unsigned long long> counter{0};
  return std::filesystem::temp_directory_path() /
         ("nerkit-" + std::to_string(::getpid()) + "-" +
          std::to_string(counter.fetch_add(1)) + std::string(suffix));
}

}  // namespace

CommandBackend::CommandBackend(std::string command,
                               std::set<Capability> capabilities)
    : command_(std::move(command)), caps_(std::move(capabilities)) {}

std::vector<BackendResponse> CommandBackend::Invoke(
    Capability capability, const std::vector<BackendRequest>& requests) const {
  if (!Supports(capability)) {
    throw Error(ErrorKind::kBackendFailure,
                identity() + " lacks capability " +
                    std::string(CapabilityName(capability)));
  }
  auto in_path = TempPath("-in.jsonl");
  auto out_path = TempPath("-out.jsonl");
  {
    std::ofstream in(in_path, std::ios::binary);
    in << EncodeRequests(requests);
    if (!in) throw Error(ErrorKind::kIo, "cannot write " + in_path.string());
  }
  std::string cmd = command_ + " " + std::string(CapabilityName(capability)) +
                    " < " + ShellQuote(in_path.string()) + " > " +
                    ShellQuote(out_path.string());
  int status = std::system(cmd.c_str());
  std::string output;
  {
    std::ifstream out(out_path, std::ios::binary);
    std::stringstream ss;
    ss << out.rdbuf();
    output = ss.str();
  }
  std::error_code ec;
  std::filesystem::remove(in_path, ec);
  std::filesystem::remove(out_path, ec);

  auto responses = DecodeResponsesImpl(output, status != 0);
  if (status != 0 && responses.empty() && !requests.empty()) {
    throw Error(ErrorKind::kBackendFailure,
                identity() + " exited with status " + std::to_string(status));
  }
  return responses;
}

// ---------------------------------------------------------------------------
// HttpBackend

HttpBackend::HttpBackend(std::string base_url, std::set<Capability> capabilities)
    : base_url_(std::move(base_url)), caps_(std::move(capabilities)) {
  auto scheme = base_url_.find("://");
  if (scheme == std::string::npos) {
    throw Error(ErrorKind::kUsage, "backend URL needs a scheme: " + base_url_);
  }
  auto slash = base_url_.find('/', scheme + 3);
  host_ = base_url_.substr(0, slash);
  path_ = slash == std::string::npos ? "" : base_url_.substr(slash);
  while (!path_.empty() && path_.back() == '/') path_.pop_back();
}

std::vector<BackendResponse> HttpBackend::Invoke(
    Capability capability, const std::vector<BackendRequest>& requests) const {
  if (!Supports(capability)) {
    throw Error(ErrorKind::kBackendFailure,
                identity() + " lacks capability " +
                    std::string(CapabilityName(capability)));
  }
  httplib::Client client(host_);
  client.set_read_timeout(300, 0);
  std::string path = path_ + "/" + std::string(CapabilityName(capability));
  auto res = client.Post(path, EncodeRequests(requests), "application/x-ndjson");
  if (!res) {
    throw Error(ErrorKind::kBackendFailure,
                identity() + ": " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw Error(ErrorKind::kBackendFailure,
                identity() + ": HTTP status " + std::to_string(res->status));
  }
  return DecodeResponses(res->body);
}

// ---------------------------------------------------------------------------

std::vector<std::optional<std::string>> InvokeBatched(
    const Backend& backend, Capability capability,
    const std::vector<BackendRequest>& requests, size_t batch_size, int jobs) {
  std::vector<std::optional<std::string>> out(requests.size());
  if (requests.empty()) return out;
  if (batch_size == 0) batch_size = requests.size();
  const long long num_batches =
      static_cast<long long>((requests.size() + batch_size - 1) / batch_size);

  std::vector<std::exception_ptr> failures(num_batches);
#pragma omp parallel for schedule(dynamic) num_threads(std::max(1, jobs))
  for (long long b = 0; b < num_batches; ++b) {
    size_t begin = b * batch_size;
    size_t end = std::min(requests.size(), begin + batch_size);
    std::vector<BackendRequest> batch(requests.begin() + begin,
                                      requests.begin() + end);
    try {
      auto responses = backend.Invoke(capability, batch);
      std::map<std::string, const BackendResponse*> by_id;
      for (const BackendResponse& r : responses) by_id.emplace(r.id, &r);
      for (size_t i = begin; i < end; ++i) {
        auto it = by_id.find(requests[i].id);
        if (it != by_id.end() && it->second->ok) out[i] = it->second->out;
      }
    } catch (...) {
      failures[b] = std::current_exception();
    }
  }
  bool any_batch_ok = false;
  for (const auto& f : failures) any_batch_ok |= !f;
  if (!any_batch_ok) std::rethrow_exception(failures.front());
  return out;
}

}  // namespace nerkit
