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

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "absl/strings/str_cat.h"
#include "gtest/gtest.h"
#include "testing/oracle.h"

namespace safeseg {
namespace {

using testing::RandInt;

FrameLog Log(Stream stream, const std::vector<double>& times,
             const std::string& prefix = "") {
  FrameLog log;
  const std::string p = prefix.empty() ? (stream == Stream::kRgb ? "r" : "n")
                                       : prefix;
  for (size_t i = 0; i < times.size(); ++i) {
    log.push_back(Frame{absl::StrCat(p, i), times[i], stream});
  }
  return log;
}

std::vector<double> Times(const FrameLog& log) {
  std::vector<double> t;
  for (const Frame& f : log) t.push_back(f.timestamp);
  return t;
}

TEST(DedupTest, Examples) {
  EXPECT_EQ(Times(*DedupFrames(Log(Stream::kRgb, {0, 1, 4, 9}))),
            (std::vector<double>{0, 4, 9}));
  EXPECT_EQ(Times(*DedupFrames(Log(Stream::kRgb, {0, 2.9, 3.0}))),
            (std::vector<double>{0, 3.0}));
  const FrameLog spaced = Log(Stream::kNir, {0, 3, 7, 100});
  EXPECT_EQ(*DedupFrames(spaced), spaced);
}

TEST(DedupTest, ComparesAgainstLastKeptFrame) {
  // 2.0 and 4.0 are each within 3 s of their predecessor; 4.0 is kept
  // because it is 4 s after the last kept frame.
  EXPECT_EQ(Times(*DedupFrames(Log(Stream::kRgb, {0, 2, 4}))),
            (std::vector<double>{0, 4}));
}

TEST(DedupTest, StreamsAreFilteredIndependently) {
  FrameLog mixed = {{"r0", 0, Stream::kRgb},
                    {"n0", 0.5, Stream::kNir},
                    {"r1", 1, Stream::kRgb},
                    {"n1", 4, Stream::kNir},
                    {"r2", 3, Stream::kRgb}};
  const FrameLog kept = *DedupFrames(mixed);
  std::vector<std::string> ids;
  for (const Frame& f : kept) ids.push_back(f.id);
  EXPECT_EQ(ids, (std::vector<std::string>{"r0", "n0", "n1", "r2"}));
}

TEST(DedupTest, Errors) {
  EXPECT_FALSE(DedupFrames(Log(Stream::kRgb, {0, 5, 4})).ok());
  EXPECT_FALSE(DedupFrames(Log(Stream::kRgb, {0}), -1).ok());
  EXPECT_TRUE(DedupFrames({}).ok());
}

TEST(DedupPropertyTest, IdempotentAndSpaced) {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 500; ++i) {
    std::vector<double> t(RandInt(rng, 0, 40));
    double now = RandInt(rng, 0, 100) / 10.0;
    for (double& x : t) {
      now += RandInt(rng, 0, 50) / 10.0;
      x = now;
    }
    const double threshold = RandInt(rng, 0, 60) / 10.0;
    const FrameLog once = *DedupFrames(Log(Stream::kRgb, t), threshold);
    EXPECT_EQ(*DedupFrames(once, threshold), once);
    for (size_t j = 1; j < once.size(); ++j) {
      EXPECT_GE(once[j].timestamp - once[j - 1].timestamp, threshold);
    }
    if (!t.empty()) EXPECT_EQ(once.front().timestamp, t.front());
  }
}

TEST(MatchPairsTest, NearestNeighbourExample) {
  auto m = MatchPairs(Log(Stream::kRgb, {10.0, 20.0}),
                      Log(Stream::kNir, {10.1, 19.95, 30.0}), 0.5);
  ASSERT_TRUE(m.ok());
  ASSERT_EQ(m->pairs.size(), 2u);
  EXPECT_EQ(m->pairs[0].rgb_id, "r0");
  EXPECT_EQ(m->pairs[0].nir_id, "n0");
  EXPECT_NEAR(m->pairs[0].skew, 0.1, 1e-12);
  EXPECT_EQ(m->pairs[1].nir_id, "n1");
  EXPECT_NEAR(m->pairs[1].skew, -0.05, 1e-12);
  EXPECT_TRUE(m->unmatched_rgb.empty());
  EXPECT_EQ(m->unmatched_nir, (std::vector<std::string>{"n2"}));
}

TEST(MatchPairsTest, IdenticalLogsPairWithZeroSkew) {
  const std::vector<double> t = {1, 2, 3.5, 8};
  auto m = MatchPairs(Log(Stream::kRgb, t), Log(Stream::kNir, t), 0.0);
  ASSERT_TRUE(m.ok());
  ASSERT_EQ(m->pairs.size(), 4u);
  for (const FramePair& p : m->pairs) EXPECT_EQ(p.skew, 0.0);
}

TEST(MatchPairsTest, EquidistantTieGoesToEarlierNir) {
  auto m = MatchPairs(Log(Stream::kRgb, {10.0}),
                      Log(Stream::kNir, {9.5, 10.5}), 0.5);
  ASSERT_TRUE(m.ok());
  ASSERT_EQ(m->pairs.size(), 1u);
  EXPECT_EQ(m->pairs[0].nir_id, "n0");
  EXPECT_EQ(m->pairs[0].skew, -0.5);
  EXPECT_EQ(m->unmatched_nir, (std::vector<std::string>{"n1"}));
}

TEST(MatchPairsTest, SkewBoundIsInclusive) {
  EXPECT_EQ(MatchPairs(Log(Stream::kRgb, {1.0}), Log(Stream::kNir, {1.5}), 0.5)
                ->pairs.size(),
            1u);
  auto far = MatchPairs(Log(Stream::kRgb, {1.0}), Log(Stream::kNir, {1.75}), 0.5);
  EXPECT_TRUE(far->pairs.empty());
  EXPECT_EQ(far->unmatched_rgb.size(), 1u);
  EXPECT_EQ(far->unmatched_nir.size(), 1u);
}

TEST(MatchPairsTest, EmptyAndInvalidInputs) {
  auto m = MatchPairs(Log(Stream::kRgb, {1, 2}), {}, 0.5);
  ASSERT_TRUE(m.ok());
  EXPECT_EQ(m->unmatched_rgb.size(), 2u);
  EXPECT_FALSE(MatchPairs(Log(Stream::kNir, {1}), {}, 0.5).ok());
  EXPECT_FALSE(MatchPairs(Log(Stream::kRgb, {2, 1}), {}, 0.5).ok());
  EXPECT_FALSE(MatchPairs({}, {}, -1).ok());
}

// Mutual nearest neighbours by exhaustive search; ties go to the earlier
// frame.
PairManifest OracleMatch(const FrameLog& rgb, const FrameLog& nir,
                         double max_skew) {
  auto nearest = [](double t, const FrameLog& to) {
    size_t best = 0;
    for (size_t j = 1; j < to.size(); ++j) {
      if (std::fabs(to[j].timestamp - t) < std::fabs(to[best].timestamp - t)) {
        best = j;
      }
    }
    return best;
  };
  PairManifest out;
  std::set<size_t> used;
  for (size_t i = 0; i < rgb.size(); ++i) {
    if (nir.empty()) {
      out.unmatched_rgb.push_back(rgb[i].id);
      continue;
    }
    const size_t j = nearest(rgb[i].timestamp, nir);
    const double skew = nir[j].timestamp - rgb[i].timestamp;
    if (nearest(nir[j].timestamp, rgb) == i && std::fabs(skew) <= max_skew) {
      out.pairs.push_back({rgb[i].id, nir[j].id, skew});
      used.insert(j);
    } else {
      out.unmatched_rgb.push_back(rgb[i].id);
    }
  }
  for (size_t j = 0; j < nir.size(); ++j) {
    if (!used.count(j)) out.unmatched_nir.push_back(nir[j].id);
  }
  return out;
}

std::vector<double> DistinctSortedTimes(std::mt19937_64& rng, int n) {
  std::set<int> ticks;
  while (static_cast<int>(ticks.size()) < n) ticks.insert(RandInt(rng, 0, 400));
  std::vector<double> t;
  for (int x : ticks) t.push_back(x / 4.0);
  return t;
}

TEST(MatchPairsPropertyTest, AgreesWithExhaustiveSearch) {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 1000; ++i) {
    const FrameLog rgb = Log(Stream::kRgb, DistinctSortedTimes(rng, RandInt(rng, 0, 25)));
    const FrameLog nir = Log(Stream::kNir, DistinctSortedTimes(rng, RandInt(rng, 0, 25)));
    const double max_skew = RandInt(rng, 0, 8) / 4.0;
    const PairManifest got = *MatchPairs(rgb, nir, max_skew);
    const PairManifest want = OracleMatch(rgb, nir, max_skew);
    ASSERT_EQ(got.pairs.size(), want.pairs.size());
    for (size_t j = 0; j < got.pairs.size(); ++j) {
      EXPECT_EQ(got.pairs[j].rgb_id, want.pairs[j].rgb_id);
      EXPECT_EQ(got.pairs[j].nir_id, want.pairs[j].nir_id);
      EXPECT_LE(std::fabs(got.pairs[j].skew), max_skew);
    }
    EXPECT_EQ(got.unmatched_rgb, want.unmatched_rgb);
    EXPECT_EQ(got.unmatched_nir, want.unmatched_nir);
    EXPECT_LE(got.pairs.size(), std::min(rgb.size(), nir.size()));
    EXPECT_EQ(got.pairs.size() + got.unmatched_rgb.size(), rgb.size());
    EXPECT_EQ(got.pairs.size() + got.unmatched_nir.size(), nir.size());
  }
}

TEST(MatchPairsPropertyTest, AlignedLogsFormBijection) {
  std::mt19937_64 rng(29);
  for (int i = 0; i < 200; ++i) {
    const std::vector<double> t = DistinctSortedTimes(rng, RandInt(rng, 1, 30));
    const PairManifest m = *MatchPairs(Log(Stream::kRgb, t), Log(Stream::kNir, t),
                                       std::numeric_limits<double>::infinity());
    ASSERT_EQ(m.pairs.size(), t.size());
    for (size_t j = 0; j < t.size(); ++j) {
      EXPECT_EQ(m.pairs[j].rgb_id, absl::StrCat("r", j));
      EXPECT_EQ(m.pairs[j].nir_id, absl::StrCat("n", j));
      EXPECT_EQ(m.pairs[j].skew, 0.0);
    }
  }
}

TEST(FrameLogCsvTest, ParseAndWrite) {
  auto log = ParseFrameLogCsv(
      "frame_id,unix_timestamp_seconds,stream\n"
      "a,1700000000.25,RGB\n"
      "b,1700000000.5,nir\n");
  ASSERT_TRUE(log.ok()) << log.status();
  ASSERT_EQ(log->size(), 2u);
  EXPECT_EQ((*log)[0].stream, Stream::kRgb);
  EXPECT_EQ((*log)[1].timestamp, 1700000000.5);
  EXPECT_EQ(*ParseFrameLogCsv(FrameLogCsv(*log)), *log);
  EXPECT_EQ(SelectStream(*log, Stream::kNir).size(), 1u);

  EXPECT_FALSE(ParseFrameLogCsv("").ok());
  EXPECT_FALSE(ParseFrameLogCsv("frame_id,unix_timestamp_seconds,stream\n"
                                "a,soon,rgb\n").ok());
  EXPECT_FALSE(ParseFrameLogCsv("frame_id,unix_timestamp_seconds,stream\n"
                                "a,1,thermal\n").ok());
  EXPECT_FALSE(ParseFrameLogCsv("frame_id,unix_timestamp_seconds,stream\n"
                                "a,nan,rgb\n").ok());
}

TEST(PairManifestCsvTest, Format) {
  const PairManifest m = *MatchPairs(Log(Stream::kRgb, {10.0, 20.0}),
                                     Log(Stream::kNir, {10.5, 30.0}), 0.5);
  EXPECT_EQ(PairManifestCsv(m), "rgb_frame_id,nir_frame_id,skew_seconds\nr0,n0,0.5\n");
  EXPECT_EQ(UnmatchedCsv(m), "stream,frame_id\nrgb,r1\nnir,n1\n");
}

}  // namespace
}  // namespace safeseg
