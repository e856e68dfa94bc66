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

#include "safeseg/metrics.h"

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace safeseg {
namespace {

struct Margins {
  explicit Margins(const ConfusionMatrix& cm)
      : rows(cm.num_classes(), 0), cols(cm.num_classes(), 0) {
    const int k = cm.num_classes();
    for (int c = 0; c < k; ++c) {
      for (int s = 0; s < k; ++s) {
        rows[c] += cm(c, s);
        cols[s] += cm(c, s);
      }
    }
  }
  // |gt_c ∪ pred_c|
  uint64_t Union(const ConfusionMatrix& cm, int c) const {
    return rows[c] + cols[c] - cm(c, c);
  }
  std::vector<uint64_t> rows;
  std::vector<uint64_t> cols;
};

absl::Status CheckShapes(const ConfusionMatrix& cm,
                         const DistanceMatrix& distances,
                         const MetricConfig& config) {
  const int k = cm.num_classes();
  if (distances.size() != k || config.important.num_classes() != k) {
    return absl::InvalidArgumentError(absl::StrCat(
        "class count mismatch: confusion ", k, ", distances ",
        distances.size(), ", important set ", config.important.num_classes()));
  }
  if (config.num_levels < 1) {
    return absl::InvalidArgumentError("num_levels must be at least 1");
  }
  if (distances.max() > config.num_levels) {
    return absl::InvalidArgumentError(
        absl::StrCat("tree distance ", distances.max(),
                     " exceeds the normaliser ", config.num_levels));
  }
  return absl::OkStatus();
}

// Every per-class score is a ratio of exact integers. It is formed with a
// single rounded division in extended precision, and means are accumulated
// in the same precision before one final rounding to double.
using Wide = long double;

Wide IouWide(const ConfusionMatrix& cm, const Margins& m, int c) {
  return static_cast<Wide>(cm(c, c)) / static_cast<Wide>(m.Union(cm, c));
}

// (n * cm(c,c) - sum_s d(c,s) * cm(c,s)) / (n * |gt_c ∪ pred_c|), which is
// I_{c,c} minus the distance-weighted cross terms. Assumes class c has
// ground-truth pixels.
Wide SafeIouWide(const ConfusionMatrix& cm, const Margins& m,
                 const DistanceMatrix& distances, int c,
                 const MetricConfig& config) {
  const __int128 n = config.num_levels;
  __int128 numerator = n * static_cast<__int128>(cm(c, c));
  const bool important = config.important.contains(c);
  for (int s = 0; s < cm.num_classes(); ++s) {
    if (s == c) continue;
    if (!important && !config.important.contains(s)) continue;
    numerator -= static_cast<__int128>(distances(c, s)) * cm(c, s);
  }
  const __int128 denominator = n * static_cast<__int128>(m.Union(cm, c));
  return static_cast<Wide>(numerator) / static_cast<Wide>(denominator);
}

absl::Status NoClassesPresent() {
  return absl::FailedPreconditionError(
      "no classes present: nothing to average");
}

}  // namespace

bool IsPresent(const ConfusionMatrix& cm, int c) {
  return cm.row_sum(c) > 0;
}

std::vector<std::optional<double>> IouPerClass(const ConfusionMatrix& cm) {
  Margins m(cm);
  std::vector<std::optional<double>> out(cm.num_classes());
  for (int c = 0; c < cm.num_classes(); ++c) {
    const uint64_t uni = m.Union(cm, c);
    if (uni > 0) {
      out[c] = static_cast<double>(cm(c, c)) / static_cast<double>(uni);
    }
  }
  return out;
}

absl::StatusOr<double> SafeIouCross(const ConfusionMatrix& cm, int c, int s) {
  const int k = cm.num_classes();
  if (c < 0 || c >= k || s < 0 || s >= k) {
    return absl::OutOfRangeError("class index out of range");
  }
  if (c == s) {
    return absl::InvalidArgumentError("cross term needs two distinct classes");
  }
  const uint64_t uni = cm.row_sum(c) + cm.col_sum(c) - cm(c, c);
  if (uni == 0) {
    return absl::FailedPreconditionError(
        absl::StrCat("class ", c, " is absent; |gt ∪ pred| is zero"));
  }
  return static_cast<double>(cm(c, s)) / static_cast<double>(uni);
}

absl::StatusOr<double> SafeIouClass(const ConfusionMatrix& cm,
                                    const DistanceMatrix& distances, int c,
                                    const MetricConfig& config) {
  if (absl::Status st = CheckShapes(cm, distances, config); !st.ok()) {
    return st;
  }
  if (c < 0 || c >= cm.num_classes()) {
    return absl::OutOfRangeError("class index out of range");
  }
  Margins m(cm);
  if (m.rows[c] == 0) {
    return absl::FailedPreconditionError(
        absl::StrCat("class ", c, " has no ground-truth pixels"));
  }
  return static_cast<double>(SafeIouWide(cm, m, distances, c, config));
}

absl::StatusOr<double> MeanIou(const ConfusionMatrix& cm,
                               PresencePolicy presence) {
  Margins m(cm);
  Wide sum = 0.0;
  int present = 0;
  for (int c = 0; c < cm.num_classes(); ++c) {
    if (m.rows[c] == 0) continue;
    sum += IouWide(cm, m, c);
    ++present;
  }
  if (present == 0) return NoClassesPresent();
  const int denom =
      presence == PresencePolicy::kExcludeAbsent ? present : cm.num_classes();
  return static_cast<double>(sum / denom);
}

absl::StatusOr<double> SafeMeanIou(const ConfusionMatrix& cm,
                                   const DistanceMatrix& distances,
                                   const MetricConfig& config) {
  absl::StatusOr<MetricReport> report = ComputeMetrics(cm, distances, config);
  if (!report.ok()) return report.status();
  return report->smiou;
}

absl::StatusOr<MetricReport> ComputeMetrics(const ConfusionMatrix& cm,
                                            const DistanceMatrix& distances,
                                            const MetricConfig& config) {
  if (absl::Status st = CheckShapes(cm, distances, config); !st.ok()) {
    return st;
  }
  const int k = cm.num_classes();
  Margins m(cm);
  MetricReport report;
  report.iou.resize(k);
  report.safe_iou.resize(k);
  Wide iou_sum = 0.0;
  Wide safe_sum = 0.0;
  int present = 0;
  for (int c = 0; c < k; ++c) {
    if (m.rows[c] == 0) continue;
    const Wide iou = IouWide(cm, m, c);
    const Wide safe = SafeIouWide(cm, m, distances, c, config);
    report.iou[c] = static_cast<double>(iou);
    report.safe_iou[c] = static_cast<double>(safe);
    iou_sum += iou;
    safe_sum += safe;
    ++present;
  }
  if (present == 0) return NoClassesPresent();
  const int denom =
      config.presence == PresencePolicy::kExcludeAbsent ? present : k;
  report.miou = static_cast<double>(iou_sum / denom);
  report.smiou = static_cast<double>(safe_sum / denom);
  report.evaluated_classes = denom;
  return report;
}

}  // namespace safeseg
