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

#include "safeseg/evaluate.h"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <thread>

#include "absl/strings/ascii.h"
#include "absl/strings/str_cat.h"
#include "safeseg/file_util.h"

namespace safeseg {
namespace {

bool IsLabelFile(const std::string& rel) {
  const std::string ext = absl::AsciiStrToLower(
      std::filesystem::path(rel).extension().string());
  return ext == ".png" || ext == ".raw" || ext == ".bin";
}

struct Slot {
  std::optional<ConfusionMatrix> cm;
  std::string error;
};

}  // namespace

absl::StatusOr<PairsetAccumulation> AccumulatePairset(
    const std::string& gt_root, const std::string& pred_root, int num_classes,
    const EvaluationOptions& options) {
  if (num_classes < 1) {
    return absl::InvalidArgumentError("num_classes must be positive");
  }
  absl::StatusOr<std::vector<std::string>> gt_files =
      ListFilesRecursive(gt_root);
  if (!gt_files.ok()) return gt_files.status();
  absl::StatusOr<std::vector<std::string>> pred_files =
      ListFilesRecursive(pred_root);
  if (!pred_files.ok()) return pred_files.status();

  std::vector<std::string> gt_labels;
  std::copy_if(gt_files->begin(), gt_files->end(),
               std::back_inserter(gt_labels), IsLabelFile);
  std::set<std::string> pred_labels;
  for (const std::string& f : *pred_files) {
    if (IsLabelFile(f)) pred_labels.insert(f);
  }

  PairsetAccumulation out;
  out.total = ConfusionMatrix(num_classes);
  std::vector<std::string> matched;
  for (const std::string& rel : gt_labels) {
    if (pred_labels.erase(rel) == 0) {
      out.errors.push_back({rel, "no prediction with this relative path"});
    } else {
      matched.push_back(rel);
    }
  }
  for (const std::string& rel : pred_labels) {
    out.errors.push_back({rel, "no ground truth with this relative path"});
  }

  LabelFormatDescriptor format = options.format;
  format.num_classes = num_classes;
  format.ignore = options.ignore;

  std::vector<Slot> slots(matched.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next++; i < matched.size(); i = next++) {
      const std::string& rel = matched[i];
      absl::StatusOr<LabelMap> gt =
          DecodeLabelMap(absl::StrCat(gt_root, "/", rel), format);
      if (!gt.ok()) {
        slots[i].error = std::string(gt.status().message());
        continue;
      }
      absl::StatusOr<LabelMap> pred =
          DecodeLabelMap(absl::StrCat(pred_root, "/", rel), format);
      if (!pred.ok()) {
        slots[i].error = std::string(pred.status().message());
        continue;
      }
      absl::StatusOr<ConfusionMatrix> cm =
          Accumulate(*gt, *pred, num_classes, options.ignore);
      if (!cm.ok()) {
        slots[i].error = std::string(cm.status().message());
        continue;
      }
      slots[i].cm = std::move(*cm);
    }
  };
  const int jobs = std::clamp(options.jobs, 1,
                              std::max<int>(1, static_cast<int>(matched.size())));
  {
    std::vector<std::jthread> pool;
    for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
    worker();
  }

  for (size_t i = 0; i < matched.size(); ++i) {
    if (!slots[i].cm) {
      out.errors.push_back({matched[i], slots[i].error});
      continue;
    }
    absl::Status st = out.total.MergeFrom(*slots[i].cm);
    if (!st.ok()) return st;
    out.images.push_back({matched[i], std::move(*slots[i].cm)});
  }
  std::sort(out.errors.begin(), out.errors.end(),
            [](const FileError& a, const FileError& b) { return a.path < b.path; });
  return out;
}

absl::StatusOr<MetricReport> ReportFromAccumulation(
    const PairsetAccumulation& accumulation, const DistanceMatrix& distances,
    const MetricConfig& config) {
  absl::StatusOr<MetricReport> report =
      ComputeMetrics(accumulation.total, distances, config);
  if (!report.ok()) return report.status();
  report->aggregation = config.aggregation;
  if (config.aggregation == Aggregation::kDatasetLevel) return report;

  double miou_sum = 0.0;
  double smiou_sum = 0.0;
  for (const ImageConfusion& image : accumulation.images) {
    if (image.cm.total() == 0) continue;
    absl::StatusOr<MetricReport> r = ComputeMetrics(image.cm, distances, config);
    if (!r.ok()) return r.status();
    report->per_image.push_back(
        {image.path, r->miou, r->smiou, r->evaluated_classes});
    miou_sum += r->miou;
    smiou_sum += r->smiou;
  }
  if (report->per_image.empty()) {
    return absl::FailedPreconditionError("no image has evaluated pixels");
  }
  const double n = static_cast<double>(report->per_image.size());
  report->miou = miou_sum / n;
  report->smiou = smiou_sum / n;
  return report;
}

absl::StatusOr<PairsetEvaluation> EvaluatePairset(
    const std::string& gt_root, const std::string& pred_root,
    const LabelHierarchy& hierarchy, const MetricConfig& config,
    const EvaluationOptions& options) {
  absl::StatusOr<PairsetAccumulation> acc = AccumulatePairset(
      gt_root, pred_root, hierarchy.num_classes(), options);
  if (!acc.ok()) return acc.status();
  DistanceMatrix distances(hierarchy);
  absl::StatusOr<MetricReport> report =
      ReportFromAccumulation(*acc, distances, config);
  if (!report.ok()) return report.status();
  return PairsetEvaluation{std::move(*acc), std::move(*report)};
}

std::vector<std::pair<std::string, ConfusionMatrix>> MergeByCondition(
    const PairsetAccumulation& accumulation) {
  std::map<std::string, ConfusionMatrix> groups;
  for (const ImageConfusion& image : accumulation.images) {
    const size_t slash = image.path.find('/');
    const std::string condition =
        slash == std::string::npos ? "" : image.path.substr(0, slash);
    auto it = groups.try_emplace(condition, image.cm.num_classes()).first;
    // Same class count by construction.
    it->second.MergeFrom(image.cm).IgnoreError();
  }
  return {groups.begin(), groups.end()};
}

}  // namespace safeseg
