// nerkit/error.h

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

#ifndef NERKIT_ERROR_H_
#define NERKIT_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace nerkit {

enum class ErrorKind {
  kUnknownTag,
  kOverlap,
  kInvalidMention,
  kInvalidTagMap,
  kMalformedTagging,
  kEmptyReference,
  kUnknownFineTag,
  kNoGroundTruthEntities,
  kEmptyCorpus,
  kOrderOutOfRange,
  kInvalidArpa,
  kInvalidPosteriors,
  kInvalidAlphabet,
  kBeamWidthZero,
  kSequenceLongerThanFrames,
  kBackendFailure,
  kIncompatibleMethod,
  kInvalidManifest,
  kDuplicateLabel,
  kIo,
  kUsage,
};

std::string_view ErrorKindName(ErrorKind kind);

/// All library failures are reported by throwing this type; kind() carries
/// the error category so callers (the CLI in particular) can map it to an
/// exit status without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(ErrorKindName(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace nerkit

#endif  // NERKIT_ERROR_H_
