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

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "absl/strings/str_cat.h"
#include "gtest/gtest.h"
#include "nlohmann/json.hpp"
#include "safeseg/file_util.h"
#include "safeseg/label_map_io.h"
#include "safeseg/report.h"
#include "testing/oracle.h"

namespace safeseg {
namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
};

RunResult RunCli(const std::string& args) {
  const std::string cmd =
      absl::StrCat("'", SAFESEG_CLI_PATH, "' ", args, " 2>/dev/null");
  RunResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return r;
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

class CliTest : public ::testing::Test {
 protected:
  std::string Write(const std::string& rel, const std::string& text) {
    const std::string path = dir_.Sub(rel);
    std::filesystem::create_directories(std::filesystem::path(path).parent_path());
    EXPECT_TRUE(WriteFileAtomically(path, text).ok());
    return path;
  }

  // Random 30-class label maps under gt/ and a noisy copy under pred/.
  void MakePairset(int images_per_condition) {
    std::mt19937_64 rng(3);
    for (const std::string cond : {"rain", "fog"}) {
      for (int i = 0; i < images_per_condition; ++i) {
        const LabelMap g = testing::RandomLabelMap(rng, 24, 16, 30, 5);
        const LabelMap p = testing::PerturbLabelMap(rng, g, 30, 70);
        const std::string rel = absl::StrCat(cond, "/", i, ".png");
        std::filesystem::create_directories(dir_.path() / "gt" / cond);
        std::filesystem::create_directories(dir_.path() / "pred" / cond);
        ASSERT_TRUE(WritePngLabelMap(dir_.Sub("gt/" + rel), g).ok());
        ASSERT_TRUE(WritePngLabelMap(dir_.Sub("pred/" + rel), p).ok());
      }
    }
  }

  testing::TempDir dir_{"cli"};
};

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(RunCli("").exit_code, 2);
  EXPECT_EQ(RunCli("frobnicate").exit_code, 2);
  EXPECT_EQ(RunCli("--help").exit_code, 0);
  EXPECT_EQ(RunCli("evaluate --gt /nonexistent --pred /nonexistent").exit_code, 2);
}

TEST_F(CliTest, Distances) {
  EXPECT_EQ(RunCli("distances --pair sidewalk motorcycle").out, "3\n");
  EXPECT_EQ(RunCli("distances --pair person rider").out, "2\n");
  EXPECT_EQ(RunCli("distances --pair truck bus").out, "1\n");
  EXPECT_EQ(RunCli("distances --pair truck unicorn").exit_code, 2);
  const RunResult matrix = RunCli("distances");
  EXPECT_EQ(matrix.exit_code, 0);
  EXPECT_EQ(std::count(matrix.out.begin(), matrix.out.end(), '\n'), 31);
}

TEST_F(CliTest, SelfComparisonIsPerfect) {
  MakePairset(2);
  const std::string gt = dir_.Sub("gt");
  const RunResult r = RunCli(absl::StrCat("evaluate --gt ", gt, " --pred ", gt));
  ASSERT_EQ(r.exit_code, 0) << r.out;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["miou"].get<double>(), 1.0);
  EXPECT_EQ(j["smiou"].get<double>(), 1.0);
}

TEST_F(CliTest, SmallerImportantSetScoresHigher) {
  MakePairset(2);
  const std::string base = absl::StrCat("evaluate --gt ", dir_.Sub("gt"),
                                        " --pred ", dir_.Sub("pred"));
  const RunResult tp = RunCli(base + " --cimp tp");
  const RunResult all = RunCli(base + " --cimp all-safe");
  ASSERT_EQ(tp.exit_code, 0);
  ASSERT_EQ(all.exit_code, 0);
  const auto jt = nlohmann::json::parse(tp.out);
  const auto ja = nlohmann::json::parse(all.out);
  EXPECT_GE(jt["smiou"].get<double>(), ja["smiou"].get<double>());
  EXPECT_LE(ja["smiou"].get<double>(), ja["miou"].get<double>());
  EXPECT_EQ(jt["miou"].get<double>(), ja["miou"].get<double>());
}

TEST_F(CliTest, ReportsAndTables) {
  MakePairset(3);
  const std::string table = dir_.Sub("out/table.csv");
  const std::string hist = dir_.Sub("out/hist.csv");
  const std::string classes = dir_.Sub("out/classes.csv");
  std::filesystem::create_directories(dir_.path() / "out");
  const RunResult r = RunCli(absl::StrCat(
      "evaluate --gt ", dir_.Sub("gt"), " --pred ", dir_.Sub("pred"),
      " --aggregation per-image --by-condition --table-out ", table,
      " --class-table-out ", classes, " --histogram ", hist,
      " --jobs 2 --out ", dir_.Sub("out/report.json")));
  ASSERT_EQ(r.exit_code, 0);
  const auto j = nlohmann::json::parse(*ReadFileToString(dir_.Sub("out/report.json")));
  EXPECT_EQ(j["per_image"].size(), 6u);
  ASSERT_EQ(j["condition_table"].size(), 3u);
  EXPECT_EQ(j["condition_table"][2]["condition"], "All");
  const std::string t = *ReadFileToString(table);
  EXPECT_EQ(t.substr(0, t.find('\n')), "condition,miou,smiou_tp,smiou");
  EXPECT_NE(t.find("\nfog,"), std::string::npos);
  EXPECT_NE(t.find("\nrain,"), std::string::npos);
  const std::string h = *ReadFileToString(hist);
  EXPECT_EQ(std::count(h.begin(), h.end(), '\n'), 81);
  EXPECT_NE(ReadFileToString(classes)->find("SafeIoU,All,"), std::string::npos);
}

TEST_F(CliTest, CsvFormatAndConditionFilter) {
  MakePairset(1);
  const RunResult r = RunCli(absl::StrCat("evaluate --gt ", dir_.Sub("gt"),
                                       " --pred ", dir_.Sub("pred"),
                                       " --condition fog --format csv"));
  ASSERT_EQ(r.exit_code, 0);
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')),
            "class_index,class_name,important,iou,safe_iou");
  EXPECT_NE(r.out.find("\n,mean,,"), std::string::npos);
}

TEST_F(CliTest, PerFileErrorsGiveExitOne) {
  MakePairset(1);
  std::filesystem::remove(dir_.path() / "pred" / "fog" / "0.png");
  const RunResult r = RunCli(absl::StrCat("evaluate --gt ", dir_.Sub("gt"),
                                       " --pred ", dir_.Sub("pred")));
  EXPECT_EQ(r.exit_code, 1);
  const auto j = nlohmann::json::parse(r.out);
  ASSERT_EQ(j["errors"].size(), 1u);
  EXPECT_EQ(j["errors"][0]["path"], "fog/0.png");
}

std::string UniformManifestCsv(const std::vector<std::string>& conditions,
                               int n) {
  std::string header = "sequence_id,condition,frame_id";
  for (int k = 0; k < 30; ++k) {
    absl::StrAppend(&header, ",pixel_count_", k, ",instance_count_", k);
  }
  std::string out = header + "\n";
  for (const std::string& c : conditions) {
    for (int i = 0; i < n; ++i) {
      absl::StrAppend(&out, c, i, ",", c, ",", c, i, "_f0");
      for (int k = 0; k < 30; ++k) absl::StrAppend(&out, ",100,2");
      out += "\n";
    }
  }
  return out;
}

TEST_F(CliTest, ValidateAndProposeSplit) {
  const std::string manifest =
      Write("m.csv", UniformManifestCsv({"rain", "snow"}, 10));
  const RunResult p1 = RunCli("propose-split --seed 9 --manifest " + manifest);
  const RunResult p2 = RunCli("propose-split --seed 9 --manifest " + manifest);
  ASSERT_EQ(p1.exit_code, 0);
  EXPECT_EQ(p1.out, p2.out);
  const std::string assignment = Write("a.csv", p1.out);
  const RunResult v =
      RunCli(absl::StrCat("validate-split --manifest ", manifest, " --assignment ",
                       assignment));
  EXPECT_EQ(v.exit_code, 0);
  EXPECT_TRUE(nlohmann::json::parse(v.out)["pass"].get<bool>());

  std::string bad = "sequence_id,split\n";
  for (const std::string c : {"rain", "snow"}) {
    for (int i = 0; i < 10; ++i) absl::StrAppend(&bad, c, i, ",", i < 3 ? "test" : "train", "\n");
  }
  const RunResult f = RunCli(absl::StrCat("validate-split --manifest ", manifest,
                                       " --assignment ", Write("b.csv", bad)));
  EXPECT_EQ(f.exit_code, 1);
  EXPECT_FALSE(nlohmann::json::parse(f.out)["pass"].get<bool>());
}

TEST_F(CliTest, ProposeSplitFlagsInfeasibleCondition) {
  const std::string manifest = Write("m.csv", UniformManifestCsv({"fog"}, 4));
  EXPECT_EQ(RunCli("propose-split --manifest " + manifest).exit_code, 1);
}

TEST_F(CliTest, DedupAndMatchPairs) {
  const std::string log = Write(
      "log.csv",
      "frame_id,unix_timestamp_seconds,stream\n"
      "r0,10.0,rgb\nr1,11.0,rgb\nr2,20.0,rgb\n"
      "n0,10.1,nir\nn1,19.95,nir\nn2,30.0,nir\n");
  const RunResult d = RunCli("dedup --log " + log);
  ASSERT_EQ(d.exit_code, 0);
  EXPECT_EQ(d.out.find("r1,"), std::string::npos);
  EXPECT_NE(d.out.find("n2,"), std::string::npos);

  const std::string unmatched = dir_.Sub("unmatched.csv");
  const RunResult m =
      RunCli(absl::StrCat("match-pairs --log ", log, " --unmatched ", unmatched));
  ASSERT_EQ(m.exit_code, 0);
  EXPECT_EQ(m.out,
            "rgb_frame_id,nir_frame_id,skew_seconds\n"
            "r0,n0," + FormatDouble(10.1 - 10.0) + "\n"
            "r2,n1," + FormatDouble(19.95 - 20.0) + "\n");
  EXPECT_EQ(*ReadFileToString(unmatched), "stream,frame_id\nrgb,r1\nnir,n2\n");
  ASSERT_EQ(RunCli(absl::StrCat("match-pairs --log ", log,
                                " --dedup-threshold 3 --unmatched ", unmatched))
                .exit_code,
            0);
  EXPECT_EQ(*ReadFileToString(unmatched), "stream,frame_id\nnir,n2\n");
  EXPECT_EQ(RunCli("match-pairs --log " + dir_.Sub("missing.csv")).exit_code, 2);
}

}  // namespace
}  // namespace safeseg
