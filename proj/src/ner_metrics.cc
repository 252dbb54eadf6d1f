// src/ner_metrics.cc

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

#include "nerkit/ner_metrics.h"

#include <fstream>
#include <sstream>

#include "nerkit/error.h"
#include "nerkit/text_util.h"

namespace nerkit {

std::vector<EntityTuple> ToTuples(const std::vector<EntityMention>& mentions) {
  std::vector<EntityTuple> tuples;
  tuples.reserve(mentions.size());
  for (const EntityMention& m : mentions) tuples.emplace_back(m.tag, m.phrase);
  return tuples;
}

TupleMatchResult MatchTuples(const std::vector<EntityTuple>& gt,
                             const std::vector<EntityTuple>& pred) {
  // Queue of unconsumed gt indices per distinct tuple, in index order.
  std::map<EntityTuple, std::vector<int>> pending;
  for (int i = static_cast<int>(gt.size()) - 1; i >= 0; --i) {
    pending[gt[i]].push_back(i);
  }
  TupleMatchResult r;
  for (int p = 0; p < static_cast<int>(pred.size()); ++p) {
    auto it = pending.find(pred[p]);
    if (it != pending.end() && !it->second.empty()) {
      r.matched_pairs.emplace_back(it->second.back(), p);
      it->second.pop_back();
      ++r.true_positive;
    } else {
      ++r.false_positive;
    }
  }
  r.false_negative = static_cast<long long>(gt.size()) - r.true_positive;
  return r;
}

PrfCounts& PrfCounts::operator+=(const PrfCounts& other) {
  true_positive += other.true_positive;
  false_positive += other.false_positive;
  false_negative += other.false_negative;
  return *this;
}

PrfCounts& PrfCounts::operator+=(const TupleMatchResult& r) {
  true_positive += r.true_positive;
  false_positive += r.false_positive;
  false_negative += r.false_negative;
  return *this;
}

PrfScores MicroPrf(const PrfCounts& c) {
  PrfScores s;
  auto ratio = [&s](long long num, long long den) {
    if (den == 0) {
      s.degenerate = true;
      return 0.0;
    }
    return static_cast<double>(num) / static_cast<double>(den);
  };
  s.precision = ratio(c.true_positive, c.true_positive + c.false_positive);
  s.recall = ratio(c.true_positive, c.true_positive + c.false_negative);
  if (s.precision + s.recall == 0.0) {
    s.degenerate = true;
    s.f1 = 0.0;
  } else {
    s.f1 = 2.0 * s.precision * s.recall / (s.precision + s.recall);
  }
  return s;
}

PrfScores MicroPrf(const std::vector<TupleMatchResult>& per_utterance) {
  PrfCounts total;
  for (const auto& r : per_utterance) total += r;
  return MicroPrf(total);
}

LabelMapping::LabelMapping(std::map<std::string, std::string> pairs)
    : pairs_(std::move(pairs)) {}

LabelMapping LabelMapping::Parse(std::string_view contents) {
  std::map<std::string, std::string> pairs;
  std::istringstream in{std::string(contents)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string_view trimmed = Trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    auto fields = SplitFields(line, '\t');
    if (fields.size() != 2 || Trim(fields[0]).empty() ||
        Trim(fields[1]).empty()) {
      throw Error(ErrorKind::kInvalidTagMap,
                  "label map line " + std::to_string(lineno) +
                      ": expected FINE<TAB>COMBINED");
    }
    std::string fine(Trim(fields[0]));
    if (!pairs.emplace(fine, std::string(Trim(fields[1]))).second) {
      throw Error(ErrorKind::kInvalidTagMap, "label " + fine + " mapped twice");
    }
  }
  return LabelMapping(std::move(pairs));
}

LabelMapping LabelMapping::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open label map " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return Parse(ss.str());
}

LabelMapping LabelMapping::Identity(const TagMap& tagmap) {
  std::map<std::string, std::string> pairs;
  for (const auto& e : tagmap.entries()) pairs.emplace(e.tag, e.tag);
  return LabelMapping(std::move(pairs));
}

const LabelMapping& LabelMapping::Default() {
  // Combined inventory: PLACE WHEN QUANT ORG NORP PERSON LAW. Fine tags
  // without an obvious combined class are stand-ins.
  static const LabelMapping kDefault({{"GPE", "PLACE"},
                                      {"LOC", "PLACE"},
                                      {"FAC", "PLACE"},
                                      {"DATE", "WHEN"},
                                      {"TIME", "WHEN"},
                                      {"EVENT", "WHEN"},
                                      {"CARDINAL", "QUANT"},
                                      {"MONEY", "QUANT"},
                                      {"ORDINAL", "QUANT"},
                                      {"PERCENT", "QUANT"},
                                      {"QUANTITY", "QUANT"},
                                      {"ORG", "ORG"},
                                      {"PRODUCT", "ORG"},
                                      {"WORK_OF_ART", "ORG"},
                                      {"NORP", "NORP"},
                                      {"LANGUAGE", "NORP"},
                                      {"PERSON", "PERSON"},
                                      {"LAW", "LAW"},
                                      {"PLACE", "PLACE"},
                                      {"WHEN", "WHEN"},
                                      {"QUANT", "QUANT"}});
  return kDefault;
}

const std::string& LabelMapping::Map(const std::string& fine) const {
  auto it = pairs_.find(fine);
  if (it == pairs_.end()) throw Error(ErrorKind::kUnknownFineTag, fine);
  return it->second;
}

std::vector<EntityMention> MapLabels(const std::vector<EntityMention>& entities,
                                     const LabelMapping& mapping) {
  std::vector<EntityMention> out = entities;
  for (EntityMention& m : out) m.tag = mapping.Map(m.tag);
  return out;
}

}  // namespace nerkit
