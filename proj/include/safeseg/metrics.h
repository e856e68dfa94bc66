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

#ifndef SAFESEG_METRICS_H_
#define SAFESEG_METRICS_H_

#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "safeseg/confusion.h"
#include "safeseg/hierarchy.h"

namespace safeseg {

// How classes without ground-truth pixels enter the means.
enum class PresencePolicy { kExcludeAbsent, kIncludeAbsentAsZero };

enum class Aggregation { kDatasetLevel, kPerImageMean };

struct MetricConfig {
  ImportantClassSet important;
  // Normaliser n of the tree-distance penalty d(c,s)/n.
  int num_levels = 1;
  PresencePolicy presence = PresencePolicy::kExcludeAbsent;
  Aggregation aggregation = Aggregation::kDatasetLevel;
};

struct ImageScore {
  std::string path;
  double miou = 0.0;
  double smiou = 0.0;
  int evaluated_classes = 0;
};

struct MetricReport {
  Aggregation aggregation = Aggregation::kDatasetLevel;
  // Per-class values from the dataset-level confusion matrix; absent classes
  // hold nullopt.
  std::vector<std::optional<double>> iou;
  std::vector<std::optional<double>> safe_iou;
  // Headline numbers: dataset-level, or the mean of `per_image` scores.
  double miou = 0.0;
  double smiou = 0.0;
  int evaluated_classes = 0;
  std::vector<ImageScore> per_image;
};

// A class is present when it has ground-truth pixels. Classes that are only
// predicted still lower the scores of the classes they were confused with,
// but have no IoU of their own.
bool IsPresent(const ConfusionMatrix& cm, int c);

// I_{c,c} = |gt_c ∩ pred_c| / |gt_c ∪ pred_c|; nullopt when the union is
// empty. A predicted-only class gets 0 here but is not present.
std::vector<std::optional<double>> IouPerClass(const ConfusionMatrix& cm);

// I^safe_{c,s} = |gt_c ∩ pred_s| / |gt_c ∪ pred_c| for s != c.
absl::StatusOr<double> SafeIouCross(const ConfusionMatrix& cm, int c, int s);

// I_{c,c} minus the distance-weighted cross terms: over every other class
// when c is important, over the important classes otherwise. Fails for an
// absent class.
absl::StatusOr<double> SafeIouClass(const ConfusionMatrix& cm,
                                    const DistanceMatrix& distances, int c,
                                    const MetricConfig& config);

absl::StatusOr<double> MeanIou(
    const ConfusionMatrix& cm,
    PresencePolicy presence = PresencePolicy::kExcludeAbsent);

absl::StatusOr<double> SafeMeanIou(const ConfusionMatrix& cm,
                                   const DistanceMatrix& distances,
                                   const MetricConfig& config);

// Dataset-level report for one confusion matrix. `config.aggregation` is
// ignored; see EvaluatePairset for per-image aggregation.
absl::StatusOr<MetricReport> ComputeMetrics(const ConfusionMatrix& cm,
                                            const DistanceMatrix& distances,
                                            const MetricConfig& config);

}  // namespace safeseg

#endif  // SAFESEG_METRICS_H_
