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

#include "safeseg/pairing.h"

#include <cmath>
#include <optional>

#include "absl/status/status.h"
#include "absl/strings/ascii.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "absl/strings/strip.h"
#include "safeseg/report.h"

namespace safeseg {
namespace {

absl::string_view StreamName(Stream s) {
  return s == Stream::kRgb ? "rgb" : "nir";
}

absl::Status CheckSorted(const FrameLog& log, absl::string_view what) {
  std::optional<double> last[2];
  for (const Frame& f : log) {
    auto& prev = last[static_cast<int>(f.stream)];
    if (prev && f.timestamp < *prev) {
      return absl::InvalidArgumentError(absl::StrCat(
          what, " timestamps decrease at frame ", f.id, " (", f.timestamp,
          " after ", *prev, ")"));
    }
    prev = f.timestamp;
  }
  return absl::OkStatus();
}

// For each element of `from`, the index of the nearest element of `to`, the
// lower index winning ties. Both sequences are sorted, so one merge pass
// suffices.
std::vector<size_t> NearestIndices(const FrameLog& from, const FrameLog& to) {
  std::vector<size_t> nearest(from.size());
  size_t j = 0;
  for (size_t i = 0; i < from.size(); ++i) {
    const double t = from[i].timestamp;
    while (j < to.size() && to[j].timestamp < t) ++j;
    if (j == 0) {
      nearest[i] = 0;
    } else if (j == to.size()) {
      nearest[i] = to.size() - 1;
    } else {
      const double before = t - to[j - 1].timestamp;
      const double after = to[j].timestamp - t;
      nearest[i] = after < before ? j : j - 1;
    }
  }
  return nearest;
}

}  // namespace

absl::StatusOr<FrameLog> ParseFrameLogCsv(absl::string_view text) {
  FrameLog log;
  bool header = false;
  int line_no = 0;
  for (absl::string_view raw : absl::StrSplit(text, '\n')) {
    ++line_no;
    absl::string_view line = absl::StripAsciiWhitespace(raw);
    if (line.empty() || line.front() == '#') continue;
    std::vector<absl::string_view> f = absl::StrSplit(line, ',');
    for (auto& field : f) field = absl::StripAsciiWhitespace(field);
    if (!header) {
      if (f.size() != 3 || f[0] != "frame_id" ||
          f[1] != "unix_timestamp_seconds" || f[2] != "stream") {
        return absl::InvalidArgumentError(
            "frame log header must be frame_id,unix_timestamp_seconds,stream");
      }
      header = true;
      continue;
    }
    Frame frame;
    std::string stream = absl::AsciiStrToLower(f.size() == 3 ? f[2] : "");
    if (f.size() != 3 || f[0].empty() ||
        !absl::SimpleAtod(f[1], &frame.timestamp) ||
        !std::isfinite(frame.timestamp) ||
        (stream != "rgb" && stream != "nir")) {
      return absl::InvalidArgumentError(absl::StrCat(
          "frame log line ", line_no,
          ": expected <frame_id>,<seconds>,rgb|nir"));
    }
    frame.id = std::string(f[0]);
    frame.stream = stream == "rgb" ? Stream::kRgb : Stream::kNir;
    log.push_back(std::move(frame));
  }
  if (!header) {
    return absl::InvalidArgumentError("frame log has no header row");
  }
  return log;
}

std::string FrameLogCsv(const FrameLog& log) {
  std::string out = "frame_id,unix_timestamp_seconds,stream\n";
  for (const Frame& f : log) {
    absl::StrAppend(&out, f.id, ",", FormatDouble(f.timestamp), ",",
                    StreamName(f.stream), "\n");
  }
  return out;
}

FrameLog SelectStream(const FrameLog& log, Stream stream) {
  FrameLog out;
  for (const Frame& f : log) {
    if (f.stream == stream) out.push_back(f);
  }
  return out;
}

absl::StatusOr<FrameLog> DedupFrames(const FrameLog& log, double threshold) {
  if (!(threshold >= 0.0)) {
    return absl::InvalidArgumentError("dedup threshold must be >= 0");
  }
  if (absl::Status st = CheckSorted(log, "frame log"); !st.ok()) return st;
  FrameLog kept;
  std::optional<double> last_kept[2];
  for (const Frame& f : log) {
    auto& last = last_kept[static_cast<int>(f.stream)];
    if (!last || f.timestamp - *last >= threshold) {
      kept.push_back(f);
      last = f.timestamp;
    }
  }
  return kept;
}

absl::StatusOr<PairManifest> MatchPairs(const FrameLog& rgb,
                                        const FrameLog& nir, double max_skew) {
  if (!(max_skew >= 0.0)) {
    return absl::InvalidArgumentError("max skew must be >= 0");
  }
  for (const Frame& f : rgb) {
    if (f.stream != Stream::kRgb) {
      return absl::InvalidArgumentError(
          absl::StrCat("frame ", f.id, " in the rgb log is not rgb"));
    }
  }
  for (const Frame& f : nir) {
    if (f.stream != Stream::kNir) {
      return absl::InvalidArgumentError(
          absl::StrCat("frame ", f.id, " in the nir log is not nir"));
    }
  }
  if (absl::Status st = CheckSorted(rgb, "rgb log"); !st.ok()) return st;
  if (absl::Status st = CheckSorted(nir, "nir log"); !st.ok()) return st;

  PairManifest out;
  std::vector<bool> nir_used(nir.size(), false);
  if (!nir.empty() && !rgb.empty()) {
    const std::vector<size_t> rgb_to_nir = NearestIndices(rgb, nir);
    const std::vector<size_t> nir_to_rgb = NearestIndices(nir, rgb);
    for (size_t i = 0; i < rgb.size(); ++i) {
      const size_t j = rgb_to_nir[i];
      const double skew = nir[j].timestamp - rgb[i].timestamp;
      if (nir_to_rgb[j] == i && std::fabs(skew) <= max_skew) {
        out.pairs.push_back(FramePair{rgb[i].id, nir[j].id, skew});
        nir_used[j] = true;
      } else {
        out.unmatched_rgb.push_back(rgb[i].id);
      }
    }
  } else {
    for (const Frame& f : rgb) out.unmatched_rgb.push_back(f.id);
  }
  for (size_t j = 0; j < nir.size(); ++j) {
    if (!nir_used[j]) out.unmatched_nir.push_back(nir[j].id);
  }
  return out;
}

std::string PairManifestCsv(const PairManifest& manifest) {
  std::string out = "rgb_frame_id,nir_frame_id,skew_seconds\n";
  for (const FramePair& p : manifest.pairs) {
    absl::StrAppend(&out, p.rgb_id, ",", p.nir_id, ",", FormatDouble(p.skew),
                    "\n");
  }
  return out;
}

std::string UnmatchedCsv(const PairManifest& manifest) {
  std::string out = "stream,frame_id\n";
  for (const std::string& id : manifest.unmatched_rgb) {
    absl::StrAppend(&out, "rgb,", id, "\n");
  }
  for (const std::string& id : manifest.unmatched_nir) {
    absl::StrAppend(&out, "nir,", id, "\n");
  }
  return out;
}

}  // namespace safeseg
