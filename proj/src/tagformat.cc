// src/tagformat.cc

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

#include "nerkit/tagformat.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "nerkit/error.h"
#include "nerkit/text_util.h"

namespace nerkit {

namespace {

bool IsPrintableAscii(char c) { return c > ' ' && c < 0x7f; }

enum class TokenKind { kWord, kOpen, kClose };

struct Token {
  TokenKind kind;
  std::string text;  // word text, or the delimiter character
};

std::vector<Token> Tokenize(std::string_view tagged, const TagMap& tagmap) {
  std::vector<Token> tokens;
  std::string word;
  auto flush = [&]() {
    if (!word.empty()) {
      tokens.push_back({TokenKind::kWord, std::move(word)});
      word.clear();
    }
  };
  for (char c : tagged) {
    if (IsSpace(c)) {
      flush();
    } else if (tagmap.IsOpen(c)) {
      flush();
      tokens.push_back({TokenKind::kOpen, std::string(1, c)});
    } else if (tagmap.IsClose(c)) {
      flush();
      tokens.push_back({TokenKind::kClose, std::string(1, c)});
    } else {
      word.push_back(c);
    }
  }
  flush();
  return tokens;
}

}  // namespace

bool TagMap::IsPlainChar(char c) {
  return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == ' ' ||
         c == '\'';
}

TagMap::TagMap(std::vector<Entry> entries, char close_char)
    : entries_(std::move(entries)), close_char_(close_char) {
  tag_of_.fill(-1);
  if (!IsPrintableAscii(close_char_) || IsPlainChar(close_char_)) {
    throw Error(ErrorKind::kInvalidTagMap,
                std::string("close character '") + close_char_ +
                    "' must be printable and outside the plain alphabet");
  }
  std::set<std::string> tags;
  for (size_t i = 0; i < entries_.size(); ++i) {
    const Entry& e = entries_[i];
    if (e.tag.empty()) {
      throw Error(ErrorKind::kInvalidTagMap, "empty tag name");
    }
    if (!tags.insert(e.tag).second) {
      throw Error(ErrorKind::kInvalidTagMap, "duplicate tag " + e.tag);
    }
    if (!IsPrintableAscii(e.open_char) || IsPlainChar(e.open_char)) {
      throw Error(ErrorKind::kInvalidTagMap,
                  "open character for " + e.tag +
                      " must be printable and outside the plain alphabet");
    }
    if (e.open_char == close_char_ || tag_of_[Index(e.open_char)] >= 0) {
      throw Error(ErrorKind::kInvalidTagMap,
                  std::string("character '") + e.open_char +
                      "' assigned twice");
    }
    tag_of_[Index(e.open_char)] = static_cast<int>(i);
  }
}

TagMap TagMap::Parse(std::string_view contents) {
  std::vector<Entry> entries;
  std::optional<char> close;
  std::istringstream in{std::string(contents)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string_view trimmed = Trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    auto fields = SplitFields(line, '\t');
    if (fields.size() != 2 || fields[1].size() != 1) {
      throw Error(ErrorKind::kInvalidTagMap,
                  "line " + std::to_string(lineno) +
                      ": expected TAG<TAB>char");
    }
    std::string tag(Trim(fields[0]));
    if (tag == "CLOSE") {
      if (close) {
        throw Error(ErrorKind::kInvalidTagMap, "CLOSE given twice");
      }
      close = fields[1][0];
    } else {
      entries.push_back({tag, fields[1][0]});
    }
  }
  return TagMap(std::move(entries), close.value_or(']'));
}

TagMap TagMap::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open tag map " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return Parse(ss.str());
}

const TagMap& TagMap::Default() {
  // Only $ % @ ` and ] are attested in published model outputs; the other
  // characters are placeholders and can be replaced through a config file.
  static const TagMap kDefault({{"NORP", '$'},
                                {"GPE", '%'},
                                {"DATE", '@'},
                                {"ORG", '`'},
                                {"PERSON", '#'},
                                {"LOC", '&'},
                                {"FAC", '*'},
                                {"PRODUCT", '+'},
                                {"EVENT", '^'},
                                {"WORK_OF_ART", '~'},
                                {"LAW", '|'},
                                {"LANGUAGE", '='},
                                {"TIME", '<'},
                                {"PERCENT", '>'},
                                {"MONEY", '!'},
                                {"QUANTITY", '?'},
                                {"ORDINAL", '{'},
                                {"CARDINAL", '}'}},
                               ']');
  return kDefault;
}

std::optional<char> TagMap::OpenCharFor(std::string_view tag) const {
  for (const Entry& e : entries_) {
    if (e.tag == tag) return e.open_char;
  }
  return std::nullopt;
}

std::string TagMap::ToConfig() const {
  std::string out;
  for (const Entry& e : entries_) {
    out += e.tag + '\t' + e.open_char + '\n';
  }
  out += std::string("CLOSE\t") + close_char_ + '\n';
  return out;
}

std::string_view DiagnosticName(DiagnosticKind kind) {
  switch (kind) {
    case DiagnosticKind::kUnclosed: return "unclosed";
    case DiagnosticKind::kStrayClose: return "stray_close";
    case DiagnosticKind::kNestedOpen: return "nested_open";
    case DiagnosticKind::kEmptySpan: return "empty_span";
  }
  return "unknown";
}

std::string ValidateMentions(const std::vector<std::string>& words,
                             const std::vector<EntityMention>& mentions) {
  int prev_end = 0;
  for (size_t i = 0; i < mentions.size(); ++i) {
    const EntityMention& m = mentions[i];
    if (m.word_count <= 0) return "mention " + std::to_string(i) + " is empty";
    if (m.start_word < 0 ||
        m.start_word + m.word_count > static_cast<int>(words.size())) {
      return "mention " + std::to_string(i) + " is out of range";
    }
    if (m.start_word < prev_end) {
      return "mention " + std::to_string(i) + " overlaps or is out of order";
    }
    std::span<const std::string> span(words.data() + m.start_word,
                                      m.word_count);
    if (JoinWords(span) != m.phrase) {
      return "mention " + std::to_string(i) + " phrase '" + m.phrase +
             "' does not match the transcript";
    }
    prev_end = m.start_word + m.word_count;
  }
  return {};
}

std::string EncodeTagged(std::string_view plain_text,
                         const std::vector<EntityMention>& mentions,
                         const TagMap& tagmap) {
  std::vector<std::string> words = SplitWords(plain_text);
  for (const std::string& w : words) {
    for (char c : w) {
      if (tagmap.IsTagChar(c)) {
        throw Error(ErrorKind::kInvalidMention,
                    "plain text contains delimiter character '" +
                        std::string(1, c) + "'");
      }
    }
  }
  std::vector<EntityMention> sorted = mentions;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const EntityMention& a, const EntityMention& b) {
                     return a.start_word < b.start_word;
                   });
  for (size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i].start_word <
        sorted[i - 1].start_word + sorted[i - 1].word_count) {
      throw Error(ErrorKind::kOverlap, "mentions '" + sorted[i - 1].phrase +
                                           "' and '" + sorted[i].phrase +
                                           "' overlap");
    }
  }
  std::vector<char> opens;
  opens.reserve(sorted.size());
  for (const EntityMention& m : sorted) {
    auto c = tagmap.OpenCharFor(m.tag);
    if (!c) throw Error(ErrorKind::kUnknownTag, m.tag);
    opens.push_back(*c);
  }
  if (std::string err = ValidateMentions(words, sorted); !err.empty()) {
    throw Error(ErrorKind::kInvalidMention, err);
  }

  std::string out;
  size_t next = 0;
  auto append = [&out](std::string_view tok) {
    if (!out.empty()) out.push_back(' ');
    out.append(tok);
  };
  for (int i = 0; i < static_cast<int>(words.size()); ++i) {
    if (next < sorted.size() && sorted[next].start_word == i) {
      append(std::string(1, opens[next]));
    }
    append(words[i]);
    if (next < sorted.size() &&
        sorted[next].start_word + sorted[next].word_count - 1 == i) {
      append(std::string(1, tagmap.close_char()));
      ++next;
    }
  }
  return out;
}

ParsedTranscript ParseTagged(std::string_view tagged, const TagMap& tagmap,
                             ParsePolicy policy) {
  std::vector<Token> tokens = Tokenize(tagged, tagmap);
  ParsedTranscript result;
  std::vector<std::string> words;

  struct OpenSpan {
    std::string tag;
    int start_word;
  };
  std::optional<OpenSpan> open;

  auto close_span = [&](int token_index) {
    int count = static_cast<int>(words.size()) - open->start_word;
    if (count == 0) {
      result.diagnostics.push_back({DiagnosticKind::kEmptySpan, token_index});
    } else {
      std::span<const std::string> span(words.data() + open->start_word,
                                        count);
      result.mentions.push_back(
          {open->tag, JoinWords(span), open->start_word, count});
    }
    open.reset();
  };

  for (int i = 0; i < static_cast<int>(tokens.size()); ++i) {
    const Token& tok = tokens[i];
    switch (tok.kind) {
      case TokenKind::kWord:
        words.push_back(tok.text);
        break;
      case TokenKind::kOpen:
        if (open) {
          result.diagnostics.push_back({DiagnosticKind::kNestedOpen, i});
          close_span(i);
        }
        open = OpenSpan{tagmap.TagFor(tok.text[0]),
                        static_cast<int>(words.size())};
        break;
      case TokenKind::kClose:
        if (open) {
          close_span(i);
        } else {
          result.diagnostics.push_back({DiagnosticKind::kStrayClose, i});
        }
        break;
    }
  }
  if (open) {
    int end = static_cast<int>(tokens.size());
    result.diagnostics.push_back({DiagnosticKind::kUnclosed, end});
    close_span(end);
  }

  if (policy == ParsePolicy::kStrict && !result.diagnostics.empty()) {
    const ParseDiagnostic& d = result.diagnostics.front();
    throw Error(ErrorKind::kMalformedTagging,
                std::string(DiagnosticName(d.kind)) + " at token " +
                    std::to_string(d.token_index) + " in '" +
                    std::string(tagged) + "'");
  }
  result.plain_text = JoinWords(words);
  return result;
}

std::string StripTags(std::string_view tagged, const TagMap& tagmap) {
  std::string out;
  out.reserve(tagged.size());
  for (char c : tagged) {
    out.push_back(tagmap.IsTagChar(c) ? ' ' : c);
  }
  return CollapseWhitespace(out);
}

std::string NormalizeForScoring(std::string_view text, const TagMap& tagmap) {
  return ToLowerAscii(StripTags(text, tagmap));
}

}  // namespace nerkit
