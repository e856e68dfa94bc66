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

#ifndef SAFESEG_LABEL_MAP_IO_H_
#define SAFESEG_LABEL_MAP_IO_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "safeseg/confusion.h"

namespace safeseg {

enum class LabelFormat { kAuto, kPng, kRaw };

// Headerless raw label data; 16-bit samples are little-endian.
struct RawLayout {
  int width = 0;
  int height = 0;
  int bits = 8;
};

struct LabelFormatDescriptor {
  // kAuto picks by extension: .png, or .raw / .bin.
  LabelFormat format = LabelFormat::kAuto;
  // When unset, raw files need a "<file>.json" sidecar holding
  // {"width": W, "height": H, "bits": 8|16}.
  std::optional<RawLayout> raw;
  // Packed 0xRRGGBB -> class value. RGB(A) PNGs are rejected without it.
  std::map<uint32_t, uint16_t> color_table;
  // Declared value range: when set, every value must be below this or equal
  // `ignore`.
  std::optional<int> num_classes;
  int ignore = kDefaultIgnoreLabel;
};

// Reads single-channel 8/16-bit grayscale or palette-index PNGs, RGB PNGs
// through a color table, and raw files.
absl::StatusOr<LabelMap> DecodeLabelMap(const std::string& path,
                                        const LabelFormatDescriptor& format);

absl::Status WritePngLabelMap(const std::string& path, const LabelMap& map,
                              int bit_depth = 8);
// Writes the raw samples and the JSON sidecar next to them.
absl::Status WriteRawLabelMap(const std::string& path, const LabelMap& map,
                              int bits = 8);

// CSV rows "r,g,b,class_index"; '#' lines are comments.
absl::StatusOr<std::map<uint32_t, uint16_t>> ParseColorTable(
    absl::string_view text);

}  // namespace safeseg

#endif  // SAFESEG_LABEL_MAP_IO_H_
