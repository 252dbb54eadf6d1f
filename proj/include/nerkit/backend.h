// nerkit/backend.h

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

#ifndef NERKIT_BACKEND_H_
#define NERKIT_BACKEND_H_

// Labeling backends stand in for the trained models (ASR, text NER, E2E NER)
// that produce pseudo-labels. They exchange newline-delimited JSON records
//   {"id": <utt_id>, "in": <input>, "out": <output>, "ok": <bool>}
// one per input; requests carry only "id" and "in".

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nerkit/tagformat.h"

namespace nerkit {

enum class Capability { kTranscribe, kTagText, kE2eNer };

std::string_view CapabilityName(Capability c);
std::optional<Capability> ParseCapability(std::string_view name);

struct BackendRequest {
  std::string id;
  std::string in;
};

struct BackendResponse {
  std::string id;
  std::string in;
  std::string out;
  bool ok = false;
};

std::string EncodeRequests(const std::vector<BackendRequest>& requests);
std::string EncodeResponses(const std::vector<BackendResponse>& responses);
/// Skips blank lines; a malformed line throws kBackendFailure.
std::vector<BackendRequest> DecodeRequests(std::string_view ndjson);
std::vector<BackendResponse> DecodeResponses(std::string_view ndjson);

class Backend {
 public:
  virtual ~Backend() = default;

  virtual std::set<Capability> capabilities() const = 0;
  /// Recorded in provenance logs.
  virtual std::string identity() const = 0;

  /// At most one response per request, in any order. Missing records and
  /// records with ok=false are per-record failures. Whole-call failures
  /// throw kBackendFailure.
  virtual std::vector<BackendResponse> Invoke(
      Capability capability, const std::vector<BackendRequest>& requests) const = 0;

  bool Supports(Capability c) const { return capabilities().count(c) > 0; }
};

struct NoiseModel {
  double sub_rate = 0.0;
  double del_rate = 0.0;
  double ins_rate = 0.0;

  /// Splits a total error rate as 1/2 substitutions, 1/4 deletions,
  /// 1/4 insertions.
  static NoiseModel Uniform(double rate) {
    return {rate * 0.5, rate * 0.25, rate * 0.25};
  }
};

struct NoiseCounts {
  long long words = 0;
  long long substituted = 0;
  long long deleted = 0;
  long long inserted = 0;
};

/// Deterministic word-level noise channel: each reference word is
/// substituted, deleted, kept with an inserted word after it, or kept, with
/// probabilities sub, del, ins, 1-sub-del-ins. The random stream depends
/// only on (seed, key).
std::vector<std::string> ApplyNoiseChannel(const std::vector<std::string>& words,
                                           const NoiseModel& noise,
                                           uint64_t seed, std::string_view key,
                                           NoiseCounts* counts = nullptr);

/// Phrase -> tag list used by the mock text tagger; longest match wins,
/// scanning left to right.
class Gazetteer {
 public:
  Gazetteer() = default;
  explicit Gazetteer(std::vector<std::pair<std::string, std::string>> entries);

  /// `phrase<TAB>TAG` lines, `#` comments.
  static Gazetteer Load(const std::string& path);
  static Gazetteer Parse(std::string_view contents);
  /// Collects the mentions of tagged transcripts; a later tag for the same
  /// phrase overrides an earlier one.
  static Gazetteer FromTagged(const std::vector<std::string>& tagged,
                              const TagMap& tagmap);

  std::vector<EntityMention> Tag(const std::vector<std::string>& words) const;
  size_t size() const { return by_phrase_.size(); }

 private:
  std::map<std::vector<std::string>, std::string> by_phrase_;
  size_t max_len_ = 0;
};

struct MockBackendOptions {
  std::set<Capability> capabilities = {Capability::kTranscribe,
                                       Capability::kTagText,
                                       Capability::kE2eNer};
  NoiseModel noise;
  uint64_t seed = 0;
  /// Probability that a record comes back with ok=false.
  double failure_rate = 0.0;
  /// utt_id -> plain reference transcript, used by transcribe and e2e_ner.
  std::map<std::string, std::string> hidden_refs;
  Gazetteer gazetteer;
  TagMap tagmap = TagMap::Default();
};

/// In-process desk-scale stand-in for neural labeling models.
///   transcribe: the hidden reference of the utt_id through the noise channel
///   tag_text:   gazetteer tagging of the input text, encoded with the tag map
///   e2e_ner:    transcribe, then tag_text
/// Output depends only on (seed, utt_id, input), never on batching.
class MockBackend : public Backend {
 public:
  explicit MockBackend(MockBackendOptions options);

  std::set<Capability> capabilities() const override { return opt_.capabilities; }
  std::string identity() const override;
  std::vector<BackendResponse> Invoke(
      Capability capability,
      const std::vector<BackendRequest>& requests) const override;

  /// Single-record entry points.
  std::optional<std::string> Transcribe(const std::string& utt_id) const;
  std::string TagText(const std::string& text) const;

 private:
  MockBackendOptions opt_;
};

/// Runs `<command> <capability>` through the shell with the request NDJSON
/// on stdin and reads response NDJSON from stdout. A nonzero exit status
/// keeps whatever complete records were written.
class CommandBackend : public Backend {
 public:
  CommandBackend(std::string command, std::set<Capability> capabilities);

  std::set<Capability> capabilities() const override { return caps_; }
  std::string identity() const override { return "cmd:" + command_; }
  std::vector<BackendResponse> Invoke(
      Capability capability,
      const std::vector<BackendRequest>& requests) const override;

 private:
  std::string command_;
  std::set<Capability> caps_;
};

/// POSTs request NDJSON to `<base_url>/<capability>` and reads response
/// NDJSON from the body.
class HttpBackend : public Backend {
 public:
  /// base_url like "http://127.0.0.1:8080/label".
  HttpBackend(std::string base_url, std::set<Capability> capabilities);

  std::set<Capability> capabilities() const override { return caps_; }
  std::string identity() const override { return "http:" + base_url_; }
  std::vector<BackendResponse> Invoke(
      Capability capability,
      const std::vector<BackendRequest>& requests) const override;

 private:
  std::string base_url_;
  std::string host_;  // scheme://host:port
  std::string path_;
  std::set<Capability> caps_;
};

/// Splits requests into batches, invokes up to `jobs` batches concurrently
/// and returns one entry per request in request order; nullopt marks a
/// missing, failed, or id-mismatched record.
std::vector<std::optional<std::string>> InvokeBatched(
    const Backend& backend, Capability capability,
    const std::vector<BackendRequest>& requests, size_t batch_size, int jobs);

}  // namespace nerkit

#endif  // NERKIT_BACKEND_H_
