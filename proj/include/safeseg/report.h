/* Copyright 2026 The safeseg Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef SAFESEG_REPORT_H_
#define SAFESEG_REPORT_H_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "safeseg/confusion.h"
#include "safeseg/evaluate.h"
#include "safeseg/hierarchy.h"
#include "safeseg/metrics.h"

namespace safeseg {

// Shortest decimal form that parses back to the same double.
std::string FormatDouble(double v);

// One row per condition plus a final "All" row computed from the merged
// matrix: mIoU, SmIoU with the traffic-participant set, SmIoU with the
// default important set.
struct ConditionRow {
  std::string condition;
  double miou = 0.0;
  double smiou_tp = 0.0;
  double smiou = 0.0;
};

absl::StatusOr<std::vector<ConditionRow>> BuildConditionTable(
    const std::vector<std::pair<std::string, ConfusionMatrix>>& per_condition,
    const DistanceMatrix& distances, const ImportantClassSet& tp,
    const ImportantClassSet& important, int num_levels,
    PresencePolicy presence);

// Percentages rounded to two decimals, for people.
std::string ConditionTableText(const std::vector<ConditionRow>& rows);
// Full-precision fractions, for machines.
std::string ConditionTableCsv(const std::vector<ConditionRow>& rows);

struct ReportMetadata {
  std::string important_selector;
  std::vector<FileError> errors;
  std::vector<ConditionRow> condition_table;
};

std::string ReportJson(const MetricReport& report,
                       const LabelHierarchy& hierarchy,
                       const MetricConfig& config,
                       const ReportMetadata& metadata);

// One row per class, then a "mean" row holding mIoU and SmIoU in the iou and
// safe_iou columns.
std::string ReportCsv(const MetricReport& report,
                      const LabelHierarchy& hierarchy,
                      const MetricConfig& config);

// Class x metric table: one IoU row and one SafeIoU row per condition, one
// column per class; absent classes are empty cells.
std::string ClassTableCsv(
    const std::vector<std::pair<std::string, MetricReport>>& by_condition,
    const LabelHierarchy& hierarchy);

struct HistogramBin {
  double lower = 0.0;
  double upper = 0.0;
  int64_t miou_count = 0;
  int64_t smiou_count = 0;
};

// Bins per-image scores, in percent, over [-100, 100]. Bins are half-open
// except the last, which also holds 100.
absl::StatusOr<std::vector<HistogramBin>> ScoreHistogram(
    const std::vector<ImageScore>& scores, double bin_width_percent = 5.0);
// Rows "metric,bin_lower,bin_upper,count" for mIoU then SmIoU.
std::string HistogramCsv(const std::vector<HistogramBin>& bins);

absl::string_view AggregationName(Aggregation a);
absl::string_view PresenceName(PresencePolicy p);

}  // namespace safeseg

#endif  // SAFESEG_REPORT_H_
