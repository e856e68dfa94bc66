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

#ifndef SAFESEG_EVALUATE_H_
#define SAFESEG_EVALUATE_H_

#include <string>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "safeseg/confusion.h"
#include "safeseg/hierarchy.h"
#include "safeseg/label_map_io.h"
#include "safeseg/metrics.h"

namespace safeseg {

struct EvaluationOptions {
  LabelFormatDescriptor format;
  int ignore = kDefaultIgnoreLabel;
  int jobs = 1;
};

struct FileError {
  std::string path;
  std::string message;
};

struct ImageConfusion {
  std::string path;
  ConfusionMatrix cm;
};

struct PairsetAccumulation {
  ConfusionMatrix total;
  // Successfully evaluated images in sorted relative-path order.
  std::vector<ImageConfusion> images;
  std::vector<FileError> errors;
};

struct PairsetEvaluation {
  PairsetAccumulation accumulation;
  MetricReport report;
};

// Pairs label maps by identical relative path under the two roots and
// accumulates one confusion matrix per pair on `options.jobs` threads.
// Unmatched or undecodable files are collected in `errors`; the remaining
// pairs are still evaluated. Results do not depend on the thread count.
absl::StatusOr<PairsetAccumulation> AccumulatePairset(
    const std::string& gt_root, const std::string& pred_root, int num_classes,
    const EvaluationOptions& options);

// Dataset-level metrics from the merged matrix; with per-image aggregation
// the headline numbers are means over images, each scored on the classes
// present in that image. Images with no evaluated pixels are skipped.
absl::StatusOr<MetricReport> ReportFromAccumulation(
    const PairsetAccumulation& accumulation, const DistanceMatrix& distances,
    const MetricConfig& config);

absl::StatusOr<PairsetEvaluation> EvaluatePairset(
    const std::string& gt_root, const std::string& pred_root,
    const LabelHierarchy& hierarchy, const MetricConfig& config,
    const EvaluationOptions& options);

// Groups per-image matrices by the first component of their relative path.
// Images directly under the root fall in condition "".
std::vector<std::pair<std::string, ConfusionMatrix>> MergeByCondition(
    const PairsetAccumulation& accumulation);

}  // namespace safeseg

#endif  // SAFESEG_EVALUATE_H_
