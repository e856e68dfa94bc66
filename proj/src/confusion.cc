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

#include "safeseg/confusion.h"

#include "absl/strings/str_cat.h"

namespace safeseg {

absl::StatusOr<LabelMap> LabelMap::Create(int width, int height,
                                          std::vector<uint16_t> values) {
  if (width <= 0 || height <= 0) {
    return absl::InvalidArgumentError(
        absl::StrCat("label map dimensions must be positive, got ", width,
                     "x", height));
  }
  if (values.size() != static_cast<size_t>(width) * height) {
    return absl::InvalidArgumentError(
        absl::StrCat("label map has ", values.size(), " values for ", width,
                     "x", height));
  }
  LabelMap m;
  m.width_ = width;
  m.height_ = height;
  m.values_ = std::move(values);
  return m;
}

ConfusionMatrix::ConfusionMatrix(int num_classes)
    : num_classes_(num_classes),
      counts_(static_cast<size_t>(num_classes) * num_classes, 0) {}

uint64_t ConfusionMatrix::row_sum(int c) const {
  uint64_t sum = 0;
  for (int s = 0; s < num_classes_; ++s) sum += (*this)(c, s);
  return sum;
}

uint64_t ConfusionMatrix::col_sum(int c) const {
  uint64_t sum = 0;
  for (int g = 0; g < num_classes_; ++g) sum += (*this)(g, c);
  return sum;
}

void ConfusionMatrix::Add(int gt, int pred, uint64_t count) {
  counts_[static_cast<size_t>(gt) * num_classes_ + pred] += count;
  total_ += count;
}

absl::Status ConfusionMatrix::MergeFrom(const ConfusionMatrix& other) {
  if (other.num_classes_ != num_classes_) {
    return absl::InvalidArgumentError(
        absl::StrCat("cannot merge confusion matrices with ", num_classes_,
                     " and ", other.num_classes_, " classes"));
  }
  for (size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
  total_ += other.total_;
  return absl::OkStatus();
}

absl::StatusOr<ConfusionMatrix> Merge(const ConfusionMatrix& x,
                                      const ConfusionMatrix& y) {
  ConfusionMatrix out = x;
  absl::Status st = out.MergeFrom(y);
  if (!st.ok()) return st;
  return out;
}

absl::Status AccumulateInto(const LabelMap& gt, const LabelMap& pred,
                            int ignore, ConfusionMatrix& cm) {
  if (gt.width() != pred.width() || gt.height() != pred.height()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "dimension mismatch: ground truth ", gt.width(), "x", gt.height(),
        ", prediction ", pred.width(), "x", pred.height()));
  }
  const int k = cm.num_classes();
  std::span<const uint16_t> g = gt.values();
  std::span<const uint16_t> p = pred.values();
  // Count into a local table first so a bad pixel leaves `cm` untouched.
  std::vector<uint64_t> local(static_cast<size_t>(k) * k, 0);
  for (size_t i = 0; i < g.size(); ++i) {
    const int gv = g[i];
    if (gv == ignore) continue;
    const int pv = p[i];
    if (pv == ignore) {
      return absl::InvalidArgumentError(absl::StrCat(
          "prediction at pixel (", i % gt.width(), ",", i / gt.width(),
          ") holds the ignore label ", ignore, " on an evaluated pixel"));
    }
    if (gv >= k || pv >= k) {
      const bool bad_gt = gv >= k;
      return absl::InvalidArgumentError(absl::StrCat(
          bad_gt ? "ground-truth" : "prediction", " value ",
          bad_gt ? gv : pv, " at pixel (", i % gt.width(), ",",
          i / gt.width(), ") is not a class index below ", k,
          bad_gt ? " or the ignore label" : ""));
    }
    ++local[static_cast<size_t>(gv) * k + pv];
  }
  for (int c = 0; c < k; ++c) {
    for (int s = 0; s < k; ++s) {
      const uint64_t n = local[static_cast<size_t>(c) * k + s];
      if (n != 0) cm.Add(c, s, n);
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<ConfusionMatrix> Accumulate(const LabelMap& gt,
                                           const LabelMap& pred,
                                           int num_classes, int ignore) {
  if (num_classes < 1) {
    return absl::InvalidArgumentError("num_classes must be positive");
  }
  ConfusionMatrix cm(num_classes);
  absl::Status st = AccumulateInto(gt, pred, ignore, cm);
  if (!st.ok()) return st;
  return cm;
}

}  // namespace safeseg
