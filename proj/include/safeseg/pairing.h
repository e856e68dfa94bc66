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

#ifndef SAFESEG_PAIRING_H_
#define SAFESEG_PAIRING_H_

#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"

namespace safeseg {

enum class Stream { kRgb, kNir };

struct Frame {
  std::string id;
  double timestamp = 0.0;
  Stream stream = Stream::kRgb;

  friend bool operator==(const Frame&, const Frame&) = default;
};

using FrameLog = std::vector<Frame>;

// CSV with header frame_id,unix_timestamp_seconds,stream.
absl::StatusOr<FrameLog> ParseFrameLogCsv(absl::string_view text);
std::string FrameLogCsv(const FrameLog& log);

// Frames of one stream, order preserved.
FrameLog SelectStream(const FrameLog& log, Stream stream);

// Keeps a frame iff at least `threshold` seconds have passed since the last
// kept frame of the same stream. The first frame of each stream is kept.
// Fails on timestamps that decrease within a stream.
absl::StatusOr<FrameLog> DedupFrames(const FrameLog& log,
                                     double threshold = 3.0);

inline constexpr double kDefaultMaxSkew = 0.5;

struct FramePair {
  std::string rgb_id;
  std::string nir_id;
  // nir timestamp minus rgb timestamp.
  double skew = 0.0;
};

struct PairManifest {
  std::vector<FramePair> pairs;
  std::vector<std::string> unmatched_rgb;
  std::vector<std::string> unmatched_nir;
};

// One-to-one nearest-timestamp matching. A pair is emitted when the two
// frames are each other's nearest neighbour and |skew| <= max_skew. On
// equal distance the earlier frame wins. Both logs must be sorted.
absl::StatusOr<PairManifest> MatchPairs(const FrameLog& rgb,
                                        const FrameLog& nir,
                                        double max_skew = kDefaultMaxSkew);

// rgb_frame_id,nir_frame_id,skew_seconds rows.
std::string PairManifestCsv(const PairManifest& manifest);
// stream,frame_id rows for frames left without a partner.
std::string UnmatchedCsv(const PairManifest& manifest);

}  // namespace safeseg

#endif  // SAFESEG_PAIRING_H_
