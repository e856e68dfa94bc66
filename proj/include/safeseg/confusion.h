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

#ifndef SAFESEG_CONFUSION_H_
#define SAFESEG_CONFUSION_H_

#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace safeseg {

inline constexpr int kDefaultIgnoreLabel = 255;

// Per-pixel class indices of one image, row-major.
class LabelMap {
 public:
  LabelMap() = default;

  static absl::StatusOr<LabelMap> Create(int width, int height,
                                         std::vector<uint16_t> values);

  int width() const { return width_; }
  int height() const { return height_; }
  size_t size() const { return values_.size(); }
  std::span<const uint16_t> values() const { return values_; }
  uint16_t at(int x, int y) const { return values_[y * width_ + x]; }

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<uint16_t> values_;
};

// Exact K x K pixel counts; entry (c, s) = |gt_c ∩ pred_s|.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(int num_classes = 0);

  int num_classes() const { return num_classes_; }
  uint64_t operator()(int gt, int pred) const {
    return counts_[static_cast<size_t>(gt) * num_classes_ + pred];
  }
  // Number of evaluated (non-ignored) pixels; equals the sum of all entries.
  uint64_t total() const { return total_; }
  uint64_t row_sum(int c) const;
  uint64_t col_sum(int c) const;
  std::span<const uint64_t> counts() const { return counts_; }

  void Add(int gt, int pred, uint64_t count = 1);
  absl::Status MergeFrom(const ConfusionMatrix& other);

  friend bool operator==(const ConfusionMatrix&,
                         const ConfusionMatrix&) = default;

 private:
  int num_classes_;
  uint64_t total_ = 0;
  std::vector<uint64_t> counts_;
};

absl::StatusOr<ConfusionMatrix> Merge(const ConfusionMatrix& x,
                                      const ConfusionMatrix& y);

// Pixels whose ground truth equals `ignore` are skipped. Any other value must
// be a class index below `num_classes`, in both maps.
absl::StatusOr<ConfusionMatrix> Accumulate(const LabelMap& gt,
                                           const LabelMap& pred,
                                           int num_classes,
                                           int ignore = kDefaultIgnoreLabel);
absl::Status AccumulateInto(const LabelMap& gt, const LabelMap& pred,
                            int ignore, ConfusionMatrix& cm);

}  // namespace safeseg

#endif  // SAFESEG_CONFUSION_H_
