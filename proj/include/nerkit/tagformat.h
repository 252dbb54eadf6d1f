// nerkit/tagformat.h

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

#ifndef NERKIT_TAGFORMAT_H_
#define NERKIT_TAGFORMAT_H_

// Tag-delimited transcripts: an entity phrase is wrapped as
//   <open_char> word word ]
// where open_char identifies the entity tag, e.g.
//   "the $ irish ] system ... dictated by the % eu ]".

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace nerkit {

class TagMap {
 public:
  struct Entry {
    std::string tag;
    char open_char;
  };

  /// Validates the invariants (distinct characters, none in the plain-text
  /// alphabet, unique nonempty tags); throws Error(kInvalidTagMap).
  TagMap(std::vector<Entry> entries, char close_char = ']');

  /// Reads `TAG<TAB>char` lines plus one `CLOSE<TAB>char` line; `#` starts a
  /// comment line.
  static TagMap Load(const std::string& path);
  static TagMap Parse(std::string_view contents);

  /// The built-in map, identical to config/tagmap.tsv.
  static const TagMap& Default();

  const std::vector<Entry>& entries() const { return entries_; }
  char close_char() const { return close_char_; }

  bool IsOpen(char c) const { return tag_of_[Index(c)] >= 0; }
  bool IsClose(char c) const { return c == close_char_; }
  bool IsTagChar(char c) const { return IsOpen(c) || IsClose(c); }

  /// Tag for an open character; precondition IsOpen(c).
  const std::string& TagFor(char c) const {
    return entries_[tag_of_[Index(c)]].tag;
  }
  std::optional<char> OpenCharFor(std::string_view tag) const;

  /// Serializes in the config file format.
  std::string ToConfig() const;

  /// Plain-text alphabet: lowercase letters, digits, space, apostrophe.
  static bool IsPlainChar(char c);

 private:
  static size_t Index(char c) { return static_cast<unsigned char>(c); }

  std::vector<Entry> entries_;
  char close_char_;
  std::array<int, 256> tag_of_;
};

struct EntityMention {
  std::string tag;
  std::string phrase;  // space-joined words, no delimiters
  int start_word = 0;  // index into the plain transcript's words
  int word_count = 0;

  bool operator==(const EntityMention&) const = default;
};

enum class ParsePolicy { kStrict, kRecover };

enum class DiagnosticKind { kUnclosed, kStrayClose, kNestedOpen, kEmptySpan };

std::string_view DiagnosticName(DiagnosticKind kind);

struct ParseDiagnostic {
  DiagnosticKind kind;
  int token_index = 0;  // position in the delimiter-split token stream

  bool operator==(const ParseDiagnostic&) const = default;
};

struct ParsedTranscript {
  std::string plain_text;
  std::vector<EntityMention> mentions;
  std::vector<ParseDiagnostic> diagnostics;
};

/// Wraps each mention in plain_text with its delimiters. Whitespace in
/// plain_text is canonicalized. Throws kUnknownTag, kOverlap, or
/// kInvalidMention when a phrase does not match the words it spans.
std::string EncodeTagged(std::string_view plain_text,
                         const std::vector<EntityMention>& mentions,
                         const TagMap& tagmap);

/// Inverse of EncodeTagged. Delimiters glued to words ("$irish]") are
/// accepted. In kStrict mode any recovery condition throws
/// kMalformedTagging; kRecover never throws:
///   unclosed    - span closed at end of utterance
///   stray_close - close without open is dropped
///   nested_open - the outer span is closed before the new one opens
///   empty_span  - a span with no words is dropped
ParsedTranscript ParseTagged(std::string_view tagged, const TagMap& tagmap,
                             ParsePolicy policy);

/// Plain text of ParseTagged in recover mode.
std::string StripTags(std::string_view tagged, const TagMap& tagmap);

/// Checks the EntityMention invariants against plain_text's words.
/// Returns an empty string when valid, otherwise a description.
std::string ValidateMentions(const std::vector<std::string>& words,
                             const std::vector<EntityMention>& mentions);

/// Lowercases, strips tag characters, collapses whitespace.
std::string NormalizeForScoring(std::string_view text, const TagMap& tagmap);

}  // namespace nerkit

#endif  // NERKIT_TAGFORMAT_H_
