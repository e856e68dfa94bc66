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

#ifndef SAFESEG_SPLITS_H_
#define SAFESEG_SPLITS_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"

namespace safeseg {

struct FrameStats {
  std::string frame_id;
  std::vector<uint64_t> pixel_counts;
  std::vector<uint64_t> instance_counts;
};

struct Sequence {
  std::string id;
  // One of rain, fog, lowlight, snow.
  std::string condition;
  std::vector<FrameStats> frames;
};

// Drive sequences with per-frame, per-class pixel and instance counts.
class DatasetManifest {
 public:
  static absl::StatusOr<DatasetManifest> Create(int num_classes,
                                                std::vector<Sequence> sequences);
  // Columns: sequence_id, condition, frame_id, pixel_count_<k>,
  // instance_count_<k> for k in 0..K-1, in any order.
  static absl::StatusOr<DatasetManifest> ParseCsv(absl::string_view text);
  // {"num_classes": K, "frames": [{"sequence_id", "condition", "frame_id",
  //  "pixel_counts": [...], "instance_counts": [...]}]}
  static absl::StatusOr<DatasetManifest> ParseJson(absl::string_view text);
  // Dispatches on the .json / .csv extension.
  static absl::StatusOr<DatasetManifest> LoadFile(const std::string& path);

  int num_classes() const { return num_classes_; }
  const std::vector<Sequence>& sequences() const { return sequences_; }
  std::vector<std::string> conditions() const;

 private:
  int num_classes_ = 0;
  std::vector<Sequence> sequences_;
};

enum class Split { kTrain, kTest };

// sequence id -> side. Whole sequences move together.
using SplitAssignment = std::map<std::string, Split>;

absl::StatusOr<SplitAssignment> ParseAssignmentCsv(absl::string_view text);
std::string AssignmentCsv(const SplitAssignment& assignment);

// Closed interval.
struct Window {
  double lo = 0.0;
  double hi = 0.0;
  bool Contains(double v) const { return v >= lo && v <= hi; }
  double Distance(double v) const {
    return v < lo ? lo - v : (v > hi ? v - hi : 0.0);
  }
};

enum class ConstraintScope { kGlobal, kPerCondition };
enum class InstanceMode { kPerClass, kAggregate };

struct SplitConstraints {
  // Test sequences / all sequences, always per condition.
  Window sequence_ratio{0.18, 0.22};
  // Mean frames per test sequence over mean frames per sequence.
  Window frames_ratio{0.9, 1.2};
  // Instances per test image over instances per image.
  Window instance_ratio{0.8, 1.2};
  // Pixels per test image over pixels per image, with minimum class counts.
  Window pixel_tight{0.8, 1.2};
  int pixel_tight_min_classes = 18;
  Window pixel_loose{0.7, 1.3};
  int pixel_loose_min_classes = 22;
  // Scope of the frame, instance and pixel constraints.
  ConstraintScope scope = ConstraintScope::kGlobal;
  InstanceMode instance_mode = InstanceMode::kPerClass;
};

struct ConstraintResult {
  std::string id;
  std::string name;
  // A condition, or "all".
  std::string scope;
  std::optional<double> value;
  // Per-class ratios; nullopt for classes skipped for lack of statistics.
  std::vector<std::optional<double>> per_class;
  Window window;
  std::optional<int> min_classes;
  int classes_in_window = 0;
  bool pass = false;
  std::string detail;
};

struct ConstraintReport {
  std::vector<ConstraintResult> results;
  bool pass = false;
};

absl::StatusOr<ConstraintReport> ValidateSplit(
    const DatasetManifest& manifest, const SplitAssignment& assignment,
    const SplitConstraints& constraints = {});

std::string ConstraintReportJson(const ConstraintReport& report);

struct ProposeOptions {
  uint64_t seed = 0;
  // Swap steps per restart.
  int max_iterations = 200;
  int restarts = 16;
  SplitConstraints constraints;
};

struct SplitProposal {
  SplitAssignment assignment;
  ConstraintReport report;
  // Conditions whose sequence count admits no test count inside the
  // sequence-ratio window.
  std::vector<std::string> infeasible_conditions;
};

// Seeded random restarts, each followed by hill climbing over single
// train/test sequence swaps within a condition. Returns the best assignment
// found even when it does not pass. Deterministic for a fixed seed.
absl::StatusOr<SplitProposal> ProposeSplit(const DatasetManifest& manifest,
                                           const ProposeOptions& options);

}  // namespace safeseg

#endif  // SAFESEG_SPLITS_H_
