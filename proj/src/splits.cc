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

#include "safeseg/splits.h"

#include <algorithm>
#include <array>
#include <random>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "absl/status/status.h"
#include "absl/strings/match.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "absl/strings/strip.h"
#include "json.hpp"
#include "safeseg/file_util.h"

namespace safeseg {
namespace {

using Json = nlohmann::ordered_json;

constexpr std::array<absl::string_view, 4> kConditions = {"rain", "fog",
                                                         "lowlight", "snow"};
// Charged for a ratio that cannot be formed because the test side is empty.
constexpr double kUndefinedPenalty = 1.0;

ConstraintResult MakeResult(std::string id, std::string name, std::string scope,
                            const Window& window) {
  ConstraintResult r;
  r.id = std::move(id);
  r.name = std::move(name);
  r.scope = std::move(scope);
  r.window = window;
  return r;
}

bool IsKnownCondition(absl::string_view c) {
  return std::find(kConditions.begin(), kConditions.end(), c) !=
         kConditions.end();
}

std::vector<std::string> SplitCsvLine(absl::string_view line) {
  std::vector<std::string> fields;
  for (absl::string_view f : absl::StrSplit(line, ',')) {
    fields.emplace_back(absl::StripAsciiWhitespace(f));
  }
  return fields;
}

absl::Status ManifestError(int line_no, absl::string_view what) {
  return absl::InvalidArgumentError(
      absl::StrCat("manifest line ", line_no, ": ", what));
}

// Frames grouped into sequences in order of first appearance.
class SequenceBuilder {
 public:
  absl::Status Add(std::string sequence_id, std::string condition,
                   FrameStats frame) {
    auto [it, inserted] = index_.try_emplace(sequence_id, sequences_.size());
    if (inserted) {
      sequences_.push_back(Sequence{std::move(sequence_id),
                                    std::move(condition), {}});
    } else if (sequences_[it->second].condition != condition) {
      return absl::InvalidArgumentError(
          absl::StrCat("sequence ", it->first, " listed under conditions ",
                       sequences_[it->second].condition, " and ", condition));
    }
    sequences_[it->second].frames.push_back(std::move(frame));
    return absl::OkStatus();
  }
  std::vector<Sequence> Release() { return std::move(sequences_); }

 private:
  std::unordered_map<std::string, size_t> index_;
  std::vector<Sequence> sequences_;
};

// Per-sequence sums, the unit that moves between train and test.
struct SequenceAggregate {
  int condition = 0;
  uint64_t frames = 0;
  std::vector<uint64_t> instances;
  std::vector<uint64_t> pixels;
};

struct Totals {
  uint64_t sequences = 0;
  uint64_t frames = 0;
  std::vector<uint64_t> instances;
  std::vector<uint64_t> pixels;

  explicit Totals(int k) : instances(k, 0), pixels(k, 0) {}

  void Add(const SequenceAggregate& s) {
    ++sequences;
    frames += s.frames;
    for (size_t k = 0; k < instances.size(); ++k) {
      instances[k] += s.instances[k];
      pixels[k] += s.pixels[k];
    }
  }
  void Remove(const SequenceAggregate& s) {
    --sequences;
    frames -= s.frames;
    for (size_t k = 0; k < instances.size(); ++k) {
      instances[k] -= s.instances[k];
      pixels[k] -= s.pixels[k];
    }
  }
};

// (a / b) / (c / d) as a single rounding of the exact rational, so that
// boundary values compare equal to their decimal literals.
double RatioOfRates(uint64_t a, uint64_t b, uint64_t c, uint64_t d) {
  const unsigned __int128 num = static_cast<unsigned __int128>(a) * d;
  const unsigned __int128 den = static_cast<unsigned __int128>(b) * c;
  return static_cast<double>(num) / static_cast<double>(den);
}

// Deficit of a "at least `min_classes` in window" constraint: the summed
// distance of the closest out-of-window classes that would have to move in.
double CountViolation(std::vector<double> outside, int in_window,
                      int min_classes) {
  int need = min_classes - in_window;
  if (need <= 0) return 0.0;
  std::sort(outside.begin(), outside.end());
  double v = 0.0;
  for (int i = 0; i < need; ++i) {
    v += i < static_cast<int>(outside.size()) ? outside[i] : kUndefinedPenalty;
  }
  return v;
}

// Evaluates the frame, instance and pixel constraints for one scope. Returns
// the total window violation; appends detailed results when `out` is set.
double EvaluateGroup(const Totals& test, const Totals& all,
                     const SplitConstraints& cons, const std::string& scope,
                     std::vector<ConstraintResult>* out) {
  const int k_classes = static_cast<int>(all.instances.size());
  double violation = 0.0;
  const bool test_empty = test.sequences == 0 || test.frames == 0;

  // Frames per sequence.
  {
    ConstraintResult r = MakeResult("C2", "frames per test sequence ratio",
                                    scope, cons.frames_ratio);
    if (test_empty || all.frames == 0) {
      violation += kUndefinedPenalty;
      r.detail = "no test frames";
    } else {
      double v = RatioOfRates(test.frames, test.sequences, all.frames,
                              all.sequences);
      r.value = v;
      r.pass = cons.frames_ratio.Contains(v);
      violation += cons.frames_ratio.Distance(v);
    }
    if (out) out->push_back(std::move(r));
  }

  // Instances per image.
  {
    ConstraintResult r = MakeResult("C3", "instances per test image ratio",
                                    scope, cons.instance_ratio);
    if (cons.instance_mode == InstanceMode::kAggregate) {
      uint64_t ti = 0, ai = 0;
      for (int k = 0; k < k_classes; ++k) {
        ti += test.instances[k];
        ai += all.instances[k];
      }
      if (ai == 0) {
        r.pass = true;
        r.detail = "no instances in scope";
      } else if (test_empty) {
        violation += kUndefinedPenalty;
        r.detail = "no test frames";
      } else {
        double v = RatioOfRates(ti, test.frames, ai, all.frames);
        r.value = v;
        r.pass = cons.instance_ratio.Contains(v);
        violation += cons.instance_ratio.Distance(v);
      }
    } else {
      r.per_class.assign(k_classes, std::nullopt);
      std::vector<int> skipped;
      bool pass = true;
      for (int k = 0; k < k_classes; ++k) {
        if (all.instances[k] == 0) {
          skipped.push_back(k);
          continue;
        }
        if (test_empty) {
          pass = false;
          violation += kUndefinedPenalty;
          continue;
        }
        double v = RatioOfRates(test.instances[k], test.frames,
                                all.instances[k], all.frames);
        r.per_class[k] = v;
        if (cons.instance_ratio.Contains(v)) {
          ++r.classes_in_window;
        } else {
          pass = false;
          violation += cons.instance_ratio.Distance(v);
        }
      }
      r.pass = pass;
      if (out && !skipped.empty()) {
        r.detail = absl::StrCat("skipped classes without instances: ",
                                absl::StrJoin(skipped, " "));
      }
    }
    if (out) out->push_back(std::move(r));
  }

  // Pixels per image, two windows with minimum class counts.
  std::vector<std::optional<double>> pixel_ratio(k_classes);
  std::vector<int> skipped;
  for (int k = 0; k < k_classes; ++k) {
    if (all.pixels[k] == 0) {
      skipped.push_back(k);
    } else if (!test_empty) {
      pixel_ratio[k] =
          RatioOfRates(test.pixels[k], test.frames, all.pixels[k], all.frames);
    }
  }
  auto pixel_constraint = [&](std::string id, const Window& w,
                              int min_classes) {
    ConstraintResult r = MakeResult(std::move(id), "pixels per test image ratio", scope, w);
    r.per_class = pixel_ratio;
    r.min_classes = min_classes;
    std::vector<double> outside;
    for (const auto& v : pixel_ratio) {
      if (!v) continue;
      if (w.Contains(*v)) {
        ++r.classes_in_window;
      } else {
        outside.push_back(w.Distance(*v));
      }
    }
    r.pass = r.classes_in_window >= min_classes;
    violation += CountViolation(std::move(outside), r.classes_in_window,
                                min_classes);
    if (out) {
      if (!skipped.empty()) {
        r.detail = absl::StrCat("skipped classes without pixels: ",
                                absl::StrJoin(skipped, " "));
      }
      out->push_back(std::move(r));
    }
  };
  pixel_constraint("C4a", cons.pixel_tight, cons.pixel_tight_min_classes);
  pixel_constraint("C4b", cons.pixel_loose, cons.pixel_loose_min_classes);
  return violation;
}

// Indexed view of a manifest shared by validation and search.
struct Problem {
  int num_classes = 0;
  std::vector<std::string> conditions;
  std::vector<SequenceAggregate> seqs;
  std::vector<std::vector<int>> by_condition;
  // Scope groups for C2..C4: one "all" group, or one per condition.
  std::vector<std::string> group_names;
  std::vector<Totals> group_all;

  int GroupOf(const SequenceAggregate& s, ConstraintScope scope) const {
    return scope == ConstraintScope::kGlobal ? 0 : s.condition;
  }
};

Problem BuildProblem(const DatasetManifest& m, ConstraintScope scope) {
  Problem p;
  p.num_classes = m.num_classes();
  p.conditions = m.conditions();
  p.by_condition.resize(p.conditions.size());
  for (const Sequence& s : m.sequences()) {
    SequenceAggregate agg;
    agg.condition = static_cast<int>(
        std::find(p.conditions.begin(), p.conditions.end(), s.condition) -
        p.conditions.begin());
    agg.frames = s.frames.size();
    agg.instances.assign(p.num_classes, 0);
    agg.pixels.assign(p.num_classes, 0);
    for (const FrameStats& f : s.frames) {
      for (int k = 0; k < p.num_classes; ++k) {
        agg.instances[k] += f.instance_counts[k];
        agg.pixels[k] += f.pixel_counts[k];
      }
    }
    p.by_condition[agg.condition].push_back(static_cast<int>(p.seqs.size()));
    p.seqs.push_back(std::move(agg));
  }
  if (scope == ConstraintScope::kGlobal) {
    p.group_names = {"all"};
  } else {
    p.group_names = p.conditions;
  }
  p.group_all.assign(p.group_names.size(), Totals(p.num_classes));
  for (const SequenceAggregate& s : p.seqs) {
    p.group_all[p.GroupOf(s, scope)].Add(s);
  }
  return p;
}

std::vector<int> FeasibleTestCounts(int n, const Window& w) {
  std::vector<int> counts;
  for (int t = 0; t <= n; ++t) {
    if (w.Contains(static_cast<double>(t) / n)) counts.push_back(t);
  }
  return counts;
}

// Test count closest to the window when none lies inside it.
int NearestTestCount(int n, const Window& w) {
  int best = 0;
  for (int t = 1; t <= n; ++t) {
    if (w.Distance(static_cast<double>(t) / n) <
        w.Distance(static_cast<double>(best) / n)) {
      best = t;
    }
  }
  return best;
}

// Uniform integer in [0, n) by rejection; independent of the standard
// library's distribution implementations so results match across platforms.
uint64_t UniformBelow(std::mt19937_64& rng, uint64_t n) {
  const uint64_t limit = std::mt19937_64::max() -
                         (std::mt19937_64::max() % n + 1) % n;
  uint64_t x;
  do {
    x = rng();
  } while (x > limit);
  return x % n;
}

struct SearchState {
  std::vector<bool> in_test;
  std::vector<Totals> group_test;
  std::vector<double> group_violation;
  double c1_violation = 0.0;

  double Score() const {
    double s = c1_violation;
    for (double v : group_violation) s += v;
    return s;
  }
};

absl::Status ValidateFrameStats(const FrameStats& f, int k) {
  if (static_cast<int>(f.pixel_counts.size()) != k ||
      static_cast<int>(f.instance_counts.size()) != k) {
    return absl::InvalidArgumentError(
        absl::StrCat("frame ", f.frame_id, " has statistics for ",
                     f.pixel_counts.size(), " pixel and ",
                     f.instance_counts.size(), " instance classes, expected ",
                     k));
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<DatasetManifest> DatasetManifest::Create(
    int num_classes, std::vector<Sequence> sequences) {
  if (num_classes < 1) {
    return absl::InvalidArgumentError("manifest needs at least one class");
  }
  if (sequences.empty()) {
    return absl::InvalidArgumentError("manifest has no sequences");
  }
  std::unordered_set<std::string> seq_ids;
  std::unordered_set<std::string> frame_ids;
  for (const Sequence& s : sequences) {
    if (s.id.empty()) {
      return absl::InvalidArgumentError("empty sequence id");
    }
    if (!seq_ids.insert(s.id).second) {
      return absl::InvalidArgumentError(
          absl::StrCat("duplicate sequence id ", s.id));
    }
    if (!IsKnownCondition(s.condition)) {
      return absl::InvalidArgumentError(
          absl::StrCat("sequence ", s.id, " has unknown condition '",
                       s.condition, "' (expected rain, fog, lowlight, snow)"));
    }
    if (s.frames.empty()) {
      return absl::InvalidArgumentError(
          absl::StrCat("sequence ", s.id, " has no frames"));
    }
    for (const FrameStats& f : s.frames) {
      if (!frame_ids.insert(f.frame_id).second) {
        return absl::InvalidArgumentError(
            absl::StrCat("frame id ", f.frame_id, " appears more than once"));
      }
      if (absl::Status st = ValidateFrameStats(f, num_classes); !st.ok()) {
        return st;
      }
    }
  }
  DatasetManifest m;
  m.num_classes_ = num_classes;
  m.sequences_ = std::move(sequences);
  return m;
}

absl::StatusOr<DatasetManifest> DatasetManifest::ParseCsv(
    absl::string_view text) {
  std::vector<absl::string_view> lines = absl::StrSplit(text, '\n');
  int header_line = -1;
  std::vector<std::string> header;
  int line_no = 0;
  SequenceBuilder builder;
  int seq_col = -1, cond_col = -1, frame_col = -1;
  std::vector<int> pixel_col, instance_col;
  for (absl::string_view raw : lines) {
    ++line_no;
    absl::string_view line = absl::StripAsciiWhitespace(raw);
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> fields = SplitCsvLine(line);
    if (header_line < 0) {
      header_line = line_no;
      header = fields;
      std::map<int, int> pixels, instances;
      for (int i = 0; i < static_cast<int>(fields.size()); ++i) {
        const std::string& h = fields[i];
        int k;
        if (h == "sequence_id") {
          seq_col = i;
        } else if (h == "condition") {
          cond_col = i;
        } else if (h == "frame_id") {
          frame_col = i;
        } else if (absl::StartsWith(h, "pixel_count_") &&
                   absl::SimpleAtoi(h.substr(12), &k) && k >= 0) {
          if (!pixels.emplace(k, i).second) {
            return ManifestError(line_no, absl::StrCat("duplicate column ", h));
          }
        } else if (absl::StartsWith(h, "instance_count_") &&
                   absl::SimpleAtoi(h.substr(15), &k) && k >= 0) {
          if (!instances.emplace(k, i).second) {
            return ManifestError(line_no, absl::StrCat("duplicate column ", h));
          }
        } else {
          return ManifestError(line_no, absl::StrCat("unknown column ", h));
        }
      }
      if (seq_col < 0 || cond_col < 0 || frame_col < 0) {
        return ManifestError(
            line_no, "header needs sequence_id, condition and frame_id");
      }
      const int k = static_cast<int>(pixels.size());
      for (int c = 0; c < k; ++c) {
        if (!pixels.contains(c)) {
          return ManifestError(line_no,
                               absl::StrCat("missing column pixel_count_", c));
        }
        if (!instances.contains(c)) {
          return ManifestError(
              line_no, absl::StrCat("missing column instance_count_", c));
        }
        pixel_col.push_back(pixels[c]);
        instance_col.push_back(instances[c]);
      }
      if (static_cast<int>(instances.size()) != k) {
        return ManifestError(line_no,
                             "pixel and instance columns cover different "
                             "classes");
      }
      continue;
    }
    if (fields.size() != header.size()) {
      return ManifestError(line_no, absl::StrCat("expected ", header.size(),
                                                 " fields, found ",
                                                 fields.size()));
    }
    FrameStats frame;
    frame.frame_id = fields[frame_col];
    for (size_t c = 0; c < pixel_col.size(); ++c) {
      uint64_t p, n;
      if (!absl::SimpleAtoi(fields[pixel_col[c]], &p) ||
          !absl::SimpleAtoi(fields[instance_col[c]], &n)) {
        return ManifestError(line_no, "counts must be non-negative integers");
      }
      frame.pixel_counts.push_back(p);
      frame.instance_counts.push_back(n);
    }
    if (absl::Status st = builder.Add(fields[seq_col], fields[cond_col],
                                      std::move(frame));
        !st.ok()) {
      return ManifestError(line_no, st.message());
    }
  }
  if (header_line < 0) {
    return absl::InvalidArgumentError("manifest has no header row");
  }
  return Create(static_cast<int>(pixel_col.size()), builder.Release());
}

absl::StatusOr<DatasetManifest> DatasetManifest::ParseJson(
    absl::string_view text) {
  Json doc = Json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded() || !doc.is_object()) {
    return absl::InvalidArgumentError("manifest is not a JSON object");
  }
  try {
    const int k = doc.at("num_classes").get<int>();
    SequenceBuilder builder;
    for (const Json& f : doc.at("frames")) {
      FrameStats frame;
      frame.frame_id = f.at("frame_id").get<std::string>();
      frame.pixel_counts = f.at("pixel_counts").get<std::vector<uint64_t>>();
      frame.instance_counts =
          f.at("instance_counts").get<std::vector<uint64_t>>();
      if (absl::Status st =
              builder.Add(f.at("sequence_id").get<std::string>(),
                          f.at("condition").get<std::string>(),
                          std::move(frame));
          !st.ok()) {
        return st;
      }
    }
    return Create(k, builder.Release());
  } catch (const Json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("malformed manifest: ", e.what()));
  }
}

absl::StatusOr<DatasetManifest> DatasetManifest::LoadFile(
    const std::string& path) {
  absl::StatusOr<std::string> text = ReadFileToString(path);
  if (!text.ok()) return text.status();
  if (absl::EndsWith(path, ".json")) return ParseJson(*text);
  return ParseCsv(*text);
}

std::vector<std::string> DatasetManifest::conditions() const {
  std::set<std::string> seen;
  for (const Sequence& s : sequences_) seen.insert(s.condition);
  return {seen.begin(), seen.end()};
}

absl::StatusOr<SplitAssignment> ParseAssignmentCsv(absl::string_view text) {
  SplitAssignment a;
  bool header = false;
  int line_no = 0;
  for (absl::string_view raw : absl::StrSplit(text, '\n')) {
    ++line_no;
    absl::string_view line = absl::StripAsciiWhitespace(raw);
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> f = SplitCsvLine(line);
    if (!header) {
      if (f != std::vector<std::string>{"sequence_id", "split"}) {
        return absl::InvalidArgumentError(
            "assignment header must be sequence_id,split");
      }
      header = true;
      continue;
    }
    if (f.size() != 2 || (f[1] != "train" && f[1] != "test")) {
      return absl::InvalidArgumentError(absl::StrCat(
          "assignment line ", line_no, ": expected <sequence_id>,train|test"));
    }
    if (!a.emplace(f[0], f[1] == "test" ? Split::kTest : Split::kTrain)
             .second) {
      return absl::InvalidArgumentError(absl::StrCat(
          "assignment line ", line_no, ": duplicate sequence ", f[0]));
    }
  }
  if (!header) {
    return absl::InvalidArgumentError("assignment has no header row");
  }
  return a;
}

std::string AssignmentCsv(const SplitAssignment& assignment) {
  std::string out = "sequence_id,split\n";
  for (const auto& [id, side] : assignment) {
    absl::StrAppend(&out, id, ",", side == Split::kTest ? "test" : "train",
                    "\n");
  }
  return out;
}

absl::StatusOr<ConstraintReport> ValidateSplit(
    const DatasetManifest& manifest, const SplitAssignment& assignment,
    const SplitConstraints& constraints) {
  for (const Sequence& s : manifest.sequences()) {
    if (!assignment.contains(s.id)) {
      return absl::InvalidArgumentError(
          absl::StrCat("assignment is missing sequence ", s.id));
    }
  }
  if (assignment.size() != manifest.sequences().size()) {
    for (const auto& [id, side] : assignment) {
      bool known = std::any_of(
          manifest.sequences().begin(), manifest.sequences().end(),
          [&id](const Sequence& s) { return s.id == id; });
      if (!known) {
        return absl::InvalidArgumentError(
            absl::StrCat("assignment names unknown sequence ", id));
      }
    }
  }

  const Problem p = BuildProblem(manifest, constraints.scope);
  ConstraintReport report;
  for (size_t c = 0; c < p.conditions.size(); ++c) {
    int test = 0;
    for (int i : p.by_condition[c]) {
      if (assignment.at(manifest.sequences()[i].id) == Split::kTest) ++test;
    }
    const int n = static_cast<int>(p.by_condition[c].size());
    ConstraintResult r = MakeResult("C1", "test sequence ratio",
                                    p.conditions[c], constraints.sequence_ratio);
    r.value = static_cast<double>(test) / n;
    r.pass = constraints.sequence_ratio.Contains(*r.value);
    r.detail = absl::StrCat(test, " of ", n, " sequences in test");
    if (FeasibleTestCounts(n, constraints.sequence_ratio).empty()) {
      absl::StrAppend(&r.detail, "; no test count reaches the window");
    }
    report.results.push_back(std::move(r));
  }

  std::vector<Totals> group_test(p.group_names.size(), Totals(p.num_classes));
  for (size_t i = 0; i < p.seqs.size(); ++i) {
    if (assignment.at(manifest.sequences()[i].id) == Split::kTest) {
      group_test[p.GroupOf(p.seqs[i], constraints.scope)].Add(p.seqs[i]);
    }
  }
  for (size_t g = 0; g < p.group_names.size(); ++g) {
    EvaluateGroup(group_test[g], p.group_all[g], constraints, p.group_names[g],
                  &report.results);
  }
  report.pass = std::all_of(report.results.begin(), report.results.end(),
                            [](const ConstraintResult& r) { return r.pass; });
  return report;
}

std::string ConstraintReportJson(const ConstraintReport& report) {
  Json doc;
  doc["pass"] = report.pass;
  Json list = Json::array();
  for (const ConstraintResult& r : report.results) {
    Json j;
    j["id"] = r.id;
    j["name"] = r.name;
    j["scope"] = r.scope;
    j["window"] = {r.window.lo, r.window.hi};
    j["value"] = r.value ? Json(*r.value) : Json(nullptr);
    if (!r.per_class.empty()) {
      Json pc = Json::array();
      for (const auto& v : r.per_class) pc.push_back(v ? Json(*v) : Json());
      j["per_class"] = std::move(pc);
      j["classes_in_window"] = r.classes_in_window;
    }
    if (r.min_classes) j["min_classes"] = *r.min_classes;
    j["pass"] = r.pass;
    if (!r.detail.empty()) j["detail"] = r.detail;
    list.push_back(std::move(j));
  }
  doc["constraints"] = std::move(list);
  return doc.dump(2) + "\n";
}

absl::StatusOr<SplitProposal> ProposeSplit(const DatasetManifest& manifest,
                                           const ProposeOptions& options) {
  if (options.restarts < 1 || options.max_iterations < 0) {
    return absl::InvalidArgumentError(
        "restarts must be positive and max_iterations non-negative");
  }
  const SplitConstraints& cons = options.constraints;
  const Problem p = BuildProblem(manifest, cons.scope);
  const size_t num_cond = p.conditions.size();

  SplitProposal proposal;
  std::vector<std::vector<int>> counts(num_cond);
  double c1_violation = 0.0;
  for (size_t c = 0; c < num_cond; ++c) {
    const int n = static_cast<int>(p.by_condition[c].size());
    counts[c] = FeasibleTestCounts(n, cons.sequence_ratio);
    if (counts[c].empty()) {
      proposal.infeasible_conditions.push_back(p.conditions[c]);
      const int t = NearestTestCount(n, cons.sequence_ratio);
      counts[c] = {t};
      c1_violation +=
          cons.sequence_ratio.Distance(static_cast<double>(t) / n);
    }
  }

  std::optional<SearchState> best;
  double best_score = 0.0;
  Totals scratch(p.num_classes);
  for (int restart = 0; restart < options.restarts; ++restart) {
    std::mt19937_64 rng(options.seed +
                        0x9E3779B97F4A7C15ULL * static_cast<uint64_t>(restart));
    SearchState st;
    st.in_test.assign(p.seqs.size(), false);
    st.c1_violation = c1_violation;
    for (size_t c = 0; c < num_cond; ++c) {
      std::vector<int> pool = p.by_condition[c];
      const int t = counts[c][UniformBelow(rng, counts[c].size())];
      for (int i = 0; i < t; ++i) {
        const size_t j = i + UniformBelow(rng, pool.size() - i);
        std::swap(pool[i], pool[j]);
        st.in_test[pool[i]] = true;
      }
    }
    st.group_test.assign(p.group_names.size(), Totals(p.num_classes));
    for (size_t i = 0; i < p.seqs.size(); ++i) {
      if (st.in_test[i]) {
        st.group_test[p.GroupOf(p.seqs[i], cons.scope)].Add(p.seqs[i]);
      }
    }
    for (size_t g = 0; g < p.group_names.size(); ++g) {
      st.group_violation.push_back(
          EvaluateGroup(st.group_test[g], p.group_all[g], cons, "", nullptr));
    }

    for (int iter = 0; iter < options.max_iterations && st.Score() > 0.0;
         ++iter) {
      double best_delta = 0.0;
      int best_out = -1, best_in = -1;
      double best_group_violation = 0.0;
      for (size_t c = 0; c < num_cond; ++c) {
        for (int a : p.by_condition[c]) {
          if (!st.in_test[a]) continue;
          for (int b : p.by_condition[c]) {
            if (st.in_test[b]) continue;
            const int g = p.GroupOf(p.seqs[a], cons.scope);
            scratch = st.group_test[g];
            scratch.Remove(p.seqs[a]);
            scratch.Add(p.seqs[b]);
            const double v =
                EvaluateGroup(scratch, p.group_all[g], cons, "", nullptr);
            const double delta = v - st.group_violation[g];
            if (delta < best_delta) {
              best_delta = delta;
              best_out = a;
              best_in = b;
              best_group_violation = v;
            }
          }
        }
      }
      if (best_out < 0) break;
      const int g = p.GroupOf(p.seqs[best_out], cons.scope);
      st.group_test[g].Remove(p.seqs[best_out]);
      st.group_test[g].Add(p.seqs[best_in]);
      st.group_violation[g] = best_group_violation;
      st.in_test[best_out] = false;
      st.in_test[best_in] = true;
    }

    const double score = st.Score();
    if (!best || score < best_score) {
      best_score = score;
      best = std::move(st);
    }
    if (best_score == 0.0) break;
  }

  for (size_t i = 0; i < p.seqs.size(); ++i) {
    proposal.assignment[manifest.sequences()[i].id] =
        best->in_test[i] ? Split::kTest : Split::kTrain;
  }
  absl::StatusOr<ConstraintReport> report =
      ValidateSplit(manifest, proposal.assignment, cons);
  if (!report.ok()) return report.status();
  proposal.report = *std::move(report);
  return proposal;
}

}  // namespace safeseg
