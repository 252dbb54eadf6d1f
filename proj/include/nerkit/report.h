// nerkit/report.h

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

#ifndef NERKIT_REPORT_H_
#define NERKIT_REPORT_H_

// Tabulates several eval reports, labeled by method and data type, into the
// long-format rows behind a grouped bar chart.

#include <optional>
#include <string>
#include <vector>

namespace nerkit {

struct LabeledReport {
  std::string method;
  std::string data_type;
  std::string json;  // an eval report
};

struct ReportRow {
  std::string method;
  std::string data_type;
  std::string metric;
  std::optional<double> value;  // null metrics stay null
};

/// Groups ordered by data type (Un-Sp, Un-Txt, Sp-Txt, then others by name),
/// then method (table order, then others by name); metrics in a fixed order.
/// Throws kDuplicateLabel for a repeated (method, data_type) pair and kUsage
/// for an empty list.
std::vector<ReportRow> BuildReportRows(const std::vector<LabeledReport>& reports);

std::string ReportRowsToCsv(const std::vector<ReportRow>& rows);
/// Schema "nerkit.report/1".
std::string ReportRowsToJson(const std::vector<ReportRow>& rows);

}  // namespace nerkit

#endif  // NERKIT_REPORT_H_
