// src/report.cc

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

#include "nerkit/report.h"

#include <algorithm>
#include <set>
#include <tuple>

#include "json.hpp"
#include "nerkit/error.h"
#include "nerkit/error_taxonomy.h"
#include "nerkit/manifest.h"
#include "nerkit/pseudolabel.h"
#include "nerkit/text_util.h"
#include "nerkit/version.h"

namespace nerkit {

namespace {

// Rank of a known name, or the list size for unknown ones.
template <typename Parse>
int Rank(const std::string& name, Parse parse) {
  auto v = parse(name);
  return v ? static_cast<int>(*v) : 1000;
}

std::optional<double> NumberAt(const nlohmann::json& j, const std::string& key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_number()) return std::nullopt;
  return it->get<double>();
}

}  // namespace

std::vector<ReportRow> BuildReportRows(const std::vector<LabeledReport>& reports) {
  if (reports.empty()) throw Error(ErrorKind::kUsage, "no reports given");
  std::set<std::pair<std::string, std::string>> labels;
  for (const LabeledReport& r : reports) {
    if (!labels.emplace(r.method, r.data_type).second) {
      throw Error(ErrorKind::kDuplicateLabel,
                  "two reports labeled " + r.method + " / " + r.data_type);
    }
  }
  std::vector<const LabeledReport*> order;
  for (const LabeledReport& r : reports) order.push_back(&r);
  auto key = [](const LabeledReport* r) {
    return std::make_tuple(Rank(r->data_type, ParseDataType), r->data_type,
                           Rank(r->method, ParseMethod), r->method);
  };
  std::sort(order.begin(), order.end(),
            [&key](auto* a, auto* b) { return key(a) < key(b); });

  std::vector<ReportRow> rows;
  for (const LabeledReport* r : order) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(r->json);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::kUsage, "report " + r->method + " / " +
                                         r->data_type + " is not JSON: " + e.what());
    }
    auto add = [&](const std::string& metric, std::optional<double> v) {
      rows.push_back({r->method, r->data_type, metric, v});
    };
    for (const char* m : {"f1", "precision", "recall", "wer", "ne_acc"}) {
      add(m, NumberAt(j, m));
    }
    auto cats = j.find("categories");
    for (ErrorCategory c : kAllErrorCategories) {
      std::string name(CategoryName(c));
      std::optional<double> v;
      if (cats != j.end() && cats->is_object() && cats->contains(name)) {
        v = NumberAt((*cats)[name], "rate");
      }
      add("rate_" + name, v);
    }
  }
  return rows;
}

std::string ReportRowsToCsv(const std::vector<ReportRow>& rows) {
  std::string out = "# schema=nerkit.report/1 version=" + std::string(kVersion) +
                    "\nmethod,data_type,metric,value\n";
  for (const ReportRow& r : rows) {
    out += r.method + ',' + r.data_type + ',' + r.metric + ',' +
           (r.value ? FormatDouble(*r.value) : std::string("n/a")) + '\n';
  }
  return out;
}

std::string ReportRowsToJson(const std::vector<ReportRow>& rows) {
  nlohmann::ordered_json j;
  j["schema"] = "nerkit.report/1";
  j["version"] = kVersion;
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const ReportRow& r : rows) {
    nlohmann::ordered_json row;
    row["method"] = r.method;
    row["data_type"] = r.data_type;
    row["metric"] = r.metric;
    row["value"] = r.value ? nlohmann::ordered_json(*r.value)
                           : nlohmann::ordered_json(nullptr);
    arr.push_back(std::move(row));
  }
  j["rows"] = arr;
  return j.dump(2) + "\n";
}

}  // namespace nerkit
