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

#include "safeseg/report.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "json.hpp"

namespace safeseg {
namespace {

using Json = nlohmann::ordered_json;

Json OptionalValue(const std::optional<double>& v) {
  return v ? Json(*v) : Json(nullptr);
}

std::string CsvField(absl::string_view s) {
  if (s.find_first_of(",\"\n") == absl::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

}  // namespace

std::string FormatDouble(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

absl::string_view AggregationName(Aggregation a) {
  return a == Aggregation::kDatasetLevel ? "dataset" : "per-image";
}

absl::string_view PresenceName(PresencePolicy p) {
  return p == PresencePolicy::kExcludeAbsent ? "exclude" : "zero";
}

absl::StatusOr<std::vector<ConditionRow>> BuildConditionTable(
    const std::vector<std::pair<std::string, ConfusionMatrix>>& per_condition,
    const DistanceMatrix& distances, const ImportantClassSet& tp,
    const ImportantClassSet& important, int num_levels,
    PresencePolicy presence) {
  if (per_condition.empty()) {
    return absl::InvalidArgumentError("condition table needs at least one "
                                      "condition");
  }
  MetricConfig tp_config{tp, num_levels, presence};
  MetricConfig config{important, num_levels, presence};
  auto row = [&](const std::string& name,
                 const ConfusionMatrix& cm) -> absl::StatusOr<ConditionRow> {
    absl::StatusOr<MetricReport> with_tp = ComputeMetrics(cm, distances, tp_config);
    if (!with_tp.ok()) return with_tp.status();
    absl::StatusOr<MetricReport> full = ComputeMetrics(cm, distances, config);
    if (!full.ok()) return full.status();
    return ConditionRow{name, full->miou, with_tp->smiou, full->smiou};
  };

  std::vector<ConditionRow> rows;
  ConfusionMatrix all(per_condition.front().second.num_classes());
  for (const auto& [name, cm] : per_condition) {
    absl::StatusOr<ConditionRow> r = row(name, cm);
    if (!r.ok()) {
      return absl::Status(r.status().code(),
                          absl::StrCat("condition '", name, "': ",
                                       r.status().message()));
    }
    rows.push_back(*r);
    if (absl::Status st = all.MergeFrom(cm); !st.ok()) return st;
  }
  absl::StatusOr<ConditionRow> total = row("All", all);
  if (!total.ok()) return total.status();
  rows.push_back(*total);
  return rows;
}

std::string ConditionTableText(const std::vector<ConditionRow>& rows) {
  std::string out =
      absl::StrFormat("%-12s %8s %11s %8s\n", "Condition", "mIoU",
                      "SmIoU(tp)", "SmIoU");
  for (const ConditionRow& r : rows) {
    absl::StrAppendFormat(&out, "%-12s %8.2f %11.2f %8.2f\n",
                          r.condition.empty() ? "(root)" : r.condition,
                          100.0 * r.miou, 100.0 * r.smiou_tp,
                          100.0 * r.smiou);
  }
  return out;
}

std::string ConditionTableCsv(const std::vector<ConditionRow>& rows) {
  std::string out = "condition,miou,smiou_tp,smiou\n";
  for (const ConditionRow& r : rows) {
    absl::StrAppend(&out, CsvField(r.condition), ",", FormatDouble(r.miou),
                    ",", FormatDouble(r.smiou_tp), ",",
                    FormatDouble(r.smiou), "\n");
  }
  return out;
}

std::string ReportJson(const MetricReport& report,
                       const LabelHierarchy& hierarchy,
                       const MetricConfig& config,
                       const ReportMetadata& metadata) {
  Json j;
  j["aggregation"] = AggregationName(report.aggregation);
  j["presence"] = PresenceName(config.presence);
  j["num_levels"] = config.num_levels;
  j["important_selector"] = metadata.important_selector;
  Json important = Json::array();
  for (int c : config.important.indices()) {
    important.push_back(hierarchy.class_name(c));
  }
  j["important_classes"] = important;
  j["miou"] = report.miou;
  j["smiou"] = report.smiou;
  j["evaluated_classes"] = report.evaluated_classes;

  Json classes = Json::array();
  for (int c = 0; c < hierarchy.num_classes(); ++c) {
    classes.push_back({{"index", c},
                       {"name", hierarchy.class_name(c)},
                       {"important", config.important.contains(c)},
                       {"iou", OptionalValue(report.iou[c])},
                       {"safe_iou", OptionalValue(report.safe_iou[c])}});
  }
  j["classes"] = classes;

  if (report.aggregation == Aggregation::kPerImageMean) {
    Json images = Json::array();
    for (const ImageScore& s : report.per_image) {
      images.push_back({{"path", s.path},
                        {"miou", s.miou},
                        {"smiou", s.smiou},
                        {"evaluated_classes", s.evaluated_classes}});
    }
    j["per_image"] = images;
  }
  if (!metadata.condition_table.empty()) {
    Json table = Json::array();
    for (const ConditionRow& r : metadata.condition_table) {
      table.push_back({{"condition", r.condition},
                       {"miou", r.miou},
                       {"smiou_tp", r.smiou_tp},
                       {"smiou", r.smiou}});
    }
    j["condition_table"] = table;
  }
  Json errors = Json::array();
  for (const FileError& e : metadata.errors) {
    errors.push_back({{"path", e.path}, {"message", e.message}});
  }
  j["errors"] = errors;
  return j.dump(2) + "\n";
}

std::string ReportCsv(const MetricReport& report,
                      const LabelHierarchy& hierarchy,
                      const MetricConfig& config) {
  std::string out = "class_index,class_name,important,iou,safe_iou\n";
  for (int c = 0; c < hierarchy.num_classes(); ++c) {
    absl::StrAppend(&out, c, ",", CsvField(hierarchy.class_name(c)), ",",
                    config.important.contains(c) ? 1 : 0, ",",
                    report.iou[c] ? FormatDouble(*report.iou[c]) : "", ",",
                    report.safe_iou[c] ? FormatDouble(*report.safe_iou[c]) : "",
                    "\n");
  }
  absl::StrAppend(&out, ",mean,,", FormatDouble(report.miou), ",",
                  FormatDouble(report.smiou), "\n");
  return out;
}

std::string ClassTableCsv(
    const std::vector<std::pair<std::string, MetricReport>>& by_condition,
    const LabelHierarchy& hierarchy) {
  std::string out = "metric,condition";
  for (const std::string& name : hierarchy.class_names()) {
    absl::StrAppend(&out, ",", CsvField(name));
  }
  out.push_back('\n');
  auto emit = [&](absl::string_view metric, const std::string& condition,
                  const std::vector<std::optional<double>>& values) {
    absl::StrAppend(&out, metric, ",", CsvField(condition));
    for (const auto& v : values) {
      absl::StrAppend(&out, ",", v ? FormatDouble(*v) : "");
    }
    out.push_back('\n');
  };
  for (const auto& [condition, report] : by_condition) {
    emit("IoU", condition, report.iou);
  }
  for (const auto& [condition, report] : by_condition) {
    emit("SafeIoU", condition, report.safe_iou);
  }
  return out;
}

absl::StatusOr<std::vector<HistogramBin>> ScoreHistogram(
    const std::vector<ImageScore>& scores, double bin_width_percent) {
  if (!(bin_width_percent > 0.0) || bin_width_percent > 200.0) {
    return absl::InvalidArgumentError("bin width must be in (0, 200]");
  }
  const int n_bins = static_cast<int>(std::ceil(200.0 / bin_width_percent - 1e-9));
  std::vector<HistogramBin> bins(n_bins);
  for (int i = 0; i < n_bins; ++i) {
    bins[i].lower = -100.0 + i * bin_width_percent;
    bins[i].upper = std::min(100.0, -100.0 + (i + 1) * bin_width_percent);
  }
  auto index = [&](double fraction) {
    const double pct = 100.0 * fraction;
    int i = static_cast<int>(std::floor((pct + 100.0) / bin_width_percent));
    return std::clamp(i, 0, n_bins - 1);
  };
  for (const ImageScore& s : scores) {
    ++bins[index(s.miou)].miou_count;
    ++bins[index(s.smiou)].smiou_count;
  }
  return bins;
}

std::string HistogramCsv(const std::vector<HistogramBin>& bins) {
  std::string out = "metric,bin_lower,bin_upper,count\n";
  for (const HistogramBin& b : bins) {
    absl::StrAppend(&out, "miou,", FormatDouble(b.lower), ",",
                    FormatDouble(b.upper), ",", b.miou_count, "\n");
  }
  for (const HistogramBin& b : bins) {
    absl::StrAppend(&out, "smiou,", FormatDouble(b.lower), ",",
                    FormatDouble(b.upper), ",", b.smiou_count, "\n");
  }
  return out;
}

}  // namespace safeseg
