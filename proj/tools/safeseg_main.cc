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

// safeseg command-line tool. Exit codes: 0 success, 1 validation or
// constraint failure, 2 input error.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/ascii.h"
#include "absl/strings/match.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "absl/strings/strip.h"
#include "safeseg/evaluate.h"
#include "safeseg/file_util.h"
#include "safeseg/hierarchy.h"
#include "safeseg/label_map_io.h"
#include "safeseg/metrics.h"
#include "safeseg/pairing.h"
#include "safeseg/report.h"
#include "safeseg/splits.h"
#include "spdlog/sinks/stdout_color_sinks.h"
#include "spdlog/spdlog.h"

namespace safeseg {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitInputError = 2;

int InputError(const absl::Status& status) {
  std::cerr << "error: " << status.message() << "\n";
  return kExitInputError;
}

// Writes to `path`, or to stdout when the path is empty or "-".
absl::Status Emit(const std::string& path, const std::string& contents) {
  if (path.empty() || path == "-") {
    std::cout << contents;
    std::cout.flush();
    return absl::OkStatus();
  }
  spdlog::debug("writing {}", path);
  return WriteFileAtomically(path, contents);
}

void ConfigureLogging() {
  auto logger = spdlog::stderr_color_mt("safeseg");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("SAFESEG_LOG")) {
    const std::string name = absl::AsciiStrToLower(env);
    const spdlog::level::level_enum level = spdlog::level::from_str(name);
    if (level == spdlog::level::off && name != "off") {
      spdlog::warn("ignoring unknown SAFESEG_LOG level '{}'", env);
    } else {
      spdlog::set_level(level);
    }
  }
}

absl::StatusOr<LabelHierarchy> LoadHierarchy(const std::string& path) {
  if (path.empty()) return LabelHierarchy::LoadDefault();
  return LabelHierarchy::LoadFile(path);
}

// A preset name, or a file listing class names, node names or class indices
// separated by commas or newlines.
absl::StatusOr<ImportantClassSet> ResolveImportant(
    const LabelHierarchy& h, const std::string& selector) {
  if (!std::filesystem::is_regular_file(selector)) {
    return h.ResolvePreset(selector);
  }
  absl::StatusOr<std::string> text = ReadFileToString(selector);
  if (!text.ok()) return text.status();
  std::vector<int> indices;
  for (absl::string_view line : absl::StrSplit(*text, '\n')) {
    line = absl::StripAsciiWhitespace(line);
    if (line.empty() || line.front() == '#') continue;
    for (absl::string_view token : absl::StrSplit(line, ',')) {
      token = absl::StripAsciiWhitespace(token);
      if (token.empty()) continue;
      int index;
      if (absl::SimpleAtoi(token, &index)) {
        indices.push_back(index);
        continue;
      }
      absl::StatusOr<std::vector<int>> under = h.ClassesUnder(token);
      if (!under.ok()) {
        return absl::InvalidArgumentError(
            absl::StrCat(selector, ": ", under.status().message()));
      }
      indices.insert(indices.end(), under->begin(), under->end());
    }
  }
  return ImportantClassSet::FromIndices(h.num_classes(), indices);
}

struct EvaluateArgs {
  std::string hierarchy;
  std::string gt;
  std::string pred;
  std::string cimp = "all-safe";
  std::string aggregation = "dataset";
  std::string presence = "exclude";
  std::string condition;
  int ignore = kDefaultIgnoreLabel;
  int jobs = 0;
  std::string out;
  std::string format = "json";
  bool by_condition = false;
  std::string table_out;
  std::string class_table_out;
  std::string histogram_out;
  double bin_width = 5.0;
  std::string color_table;
  int raw_width = 0;
  int raw_height = 0;
  int raw_bits = 8;
};

int RunEvaluate(const EvaluateArgs& args) {
  absl::StatusOr<LabelHierarchy> h = LoadHierarchy(args.hierarchy);
  if (!h.ok()) return InputError(h.status());
  absl::StatusOr<ImportantClassSet> important = ResolveImportant(*h, args.cimp);
  if (!important.ok()) return InputError(important.status());

  MetricConfig config;
  config.important = *important;
  config.num_levels = h->num_levels();
  config.presence = args.presence == "zero"
                        ? PresencePolicy::kIncludeAbsentAsZero
                        : PresencePolicy::kExcludeAbsent;
  config.aggregation = args.aggregation == "per-image"
                           ? Aggregation::kPerImageMean
                           : Aggregation::kDatasetLevel;

  EvaluationOptions options;
  options.ignore = args.ignore;
  options.jobs = args.jobs > 0
                     ? args.jobs
                     : std::max(1u, std::thread::hardware_concurrency());
  options.format.ignore = args.ignore;
  if (!args.color_table.empty()) {
    absl::StatusOr<std::string> text = ReadFileToString(args.color_table);
    if (!text.ok()) return InputError(text.status());
    absl::StatusOr<std::map<uint32_t, uint16_t>> table = ParseColorTable(*text);
    if (!table.ok()) return InputError(table.status());
    options.format.color_table = *std::move(table);
  }
  if (args.raw_width > 0 || args.raw_height > 0) {
    if (args.raw_width <= 0 || args.raw_height <= 0) {
      return InputError(absl::InvalidArgumentError(
          "--raw-width and --raw-height must be given together"));
    }
    options.format.raw = RawLayout{args.raw_width, args.raw_height,
                                   args.raw_bits};
  }

  std::string gt_root = args.gt;
  std::string pred_root = args.pred;
  if (!args.condition.empty()) {
    gt_root = (std::filesystem::path(gt_root) / args.condition).string();
    pred_root = (std::filesystem::path(pred_root) / args.condition).string();
  }
  spdlog::info("evaluating {} against {} with {} jobs", pred_root, gt_root,
               options.jobs);
  absl::StatusOr<PairsetAccumulation> acc =
      AccumulatePairset(gt_root, pred_root, h->num_classes(), options);
  if (!acc.ok()) return InputError(acc.status());
  for (const FileError& e : acc->errors) {
    spdlog::warn("{}: {}", e.path, e.message);
  }
  if (acc->images.empty()) {
    return InputError(absl::InvalidArgumentError(absl::StrCat(
        "no label-map pairs could be evaluated under ", gt_root)));
  }

  const DistanceMatrix distances(*h);
  absl::StatusOr<MetricReport> report =
      ReportFromAccumulation(*acc, distances, config);
  if (!report.ok()) return InputError(report.status());

  ReportMetadata meta;
  meta.important_selector = args.cimp;
  meta.errors = acc->errors;
  const bool want_conditions = args.by_condition ||
                               !args.table_out.empty() ||
                               !args.class_table_out.empty();
  if (want_conditions) {
    absl::StatusOr<ImportantClassSet> tp = h->ResolvePreset("tp");
    if (!tp.ok()) return InputError(tp.status());
    const auto per_condition = MergeByCondition(*acc);
    absl::StatusOr<std::vector<ConditionRow>> rows =
        BuildConditionTable(per_condition, distances, *tp, *important,
                            config.num_levels, config.presence);
    if (!rows.ok()) return InputError(rows.status());
    meta.condition_table = *rows;
    if (!args.table_out.empty()) {
      const std::string table = absl::EndsWith(args.table_out, ".csv")
                                    ? ConditionTableCsv(*rows)
                                    : ConditionTableText(*rows);
      if (absl::Status st = Emit(args.table_out, table); !st.ok()) {
        return InputError(st);
      }
    }
    if (!args.class_table_out.empty()) {
      std::vector<std::pair<std::string, MetricReport>> by_condition;
      MetricConfig dataset_config = config;
      dataset_config.aggregation = Aggregation::kDatasetLevel;
      for (const auto& [name, cm] : per_condition) {
        absl::StatusOr<MetricReport> r =
            ComputeMetrics(cm, distances, dataset_config);
        if (!r.ok()) return InputError(r.status());
        by_condition.emplace_back(name, *std::move(r));
      }
      absl::StatusOr<MetricReport> all =
          ComputeMetrics(acc->total, distances, dataset_config);
      if (!all.ok()) return InputError(all.status());
      by_condition.emplace_back("All", *std::move(all));
      if (absl::Status st = Emit(args.class_table_out,
                                 ClassTableCsv(by_condition, *h));
          !st.ok()) {
        return InputError(st);
      }
    }
  }

  if (!args.histogram_out.empty()) {
    std::vector<ImageScore> scores = report->per_image;
    if (config.aggregation != Aggregation::kPerImageMean) {
      MetricConfig per_image = config;
      per_image.aggregation = Aggregation::kPerImageMean;
      absl::StatusOr<MetricReport> r =
          ReportFromAccumulation(*acc, distances, per_image);
      if (!r.ok()) return InputError(r.status());
      scores = r->per_image;
    }
    absl::StatusOr<std::vector<HistogramBin>> bins =
        ScoreHistogram(scores, args.bin_width);
    if (!bins.ok()) return InputError(bins.status());
    if (absl::Status st = Emit(args.histogram_out, HistogramCsv(*bins));
        !st.ok()) {
      return InputError(st);
    }
  }

  const std::string body = args.format == "csv"
                               ? ReportCsv(*report, *h, config)
                               : ReportJson(*report, *h, config, meta);
  if (absl::Status st = Emit(args.out, body); !st.ok()) return InputError(st);
  if (!acc->errors.empty()) {
    std::cerr << "error: " << acc->errors.size()
              << " file(s) could not be evaluated\n";
    return kExitFailed;
  }
  return kExitOk;
}

int RunDistances(const std::string& hierarchy_path,
                 const std::vector<std::string>& pair, const std::string& out) {
  absl::StatusOr<LabelHierarchy> h = LoadHierarchy(hierarchy_path);
  if (!h.ok()) return InputError(h.status());
  if (!pair.empty()) {
    absl::StatusOr<int> d = h->TreeDistance(pair[0], pair[1]);
    if (!d.ok()) return InputError(d.status());
    if (absl::Status st = Emit(out, absl::StrCat(*d, "\n")); !st.ok()) {
      return InputError(st);
    }
    return kExitOk;
  }
  const DistanceMatrix dm(*h);
  std::string csv = "class";
  for (const std::string& name : h->class_names()) {
    absl::StrAppend(&csv, ",", name);
  }
  csv.push_back('\n');
  for (int c = 0; c < dm.size(); ++c) {
    absl::StrAppend(&csv, h->class_name(c));
    for (int s = 0; s < dm.size(); ++s) absl::StrAppend(&csv, ",", dm(c, s));
    csv.push_back('\n');
  }
  if (absl::Status st = Emit(out, csv); !st.ok()) return InputError(st);
  return kExitOk;
}

struct SplitArgs {
  std::string manifest;
  std::string assignment;
  std::string scope = "global";
  std::string instance_mode = "per-class";
  std::string out;
  std::string report_out;
  uint64_t seed = 0;
  int max_iterations = 200;
  int restarts = 16;
};

SplitConstraints ConstraintsFrom(const SplitArgs& args) {
  SplitConstraints c;
  c.scope = args.scope == "per-condition" ? ConstraintScope::kPerCondition
                                          : ConstraintScope::kGlobal;
  c.instance_mode = args.instance_mode == "aggregate"
                        ? InstanceMode::kAggregate
                        : InstanceMode::kPerClass;
  return c;
}

void LogFailures(const ConstraintReport& report) {
  for (const ConstraintResult& r : report.results) {
    if (!r.pass) spdlog::info("{} ({}) fails for scope {}", r.id, r.name,
                              r.scope);
  }
}

int RunValidateSplit(const SplitArgs& args) {
  absl::StatusOr<DatasetManifest> m = DatasetManifest::LoadFile(args.manifest);
  if (!m.ok()) return InputError(m.status());
  absl::StatusOr<std::string> text = ReadFileToString(args.assignment);
  if (!text.ok()) return InputError(text.status());
  absl::StatusOr<SplitAssignment> a = ParseAssignmentCsv(*text);
  if (!a.ok()) return InputError(a.status());
  absl::StatusOr<ConstraintReport> report =
      ValidateSplit(*m, *a, ConstraintsFrom(args));
  if (!report.ok()) return InputError(report.status());
  if (absl::Status st = Emit(args.out, ConstraintReportJson(*report));
      !st.ok()) {
    return InputError(st);
  }
  LogFailures(*report);
  return report->pass ? kExitOk : kExitFailed;
}

int RunProposeSplit(const SplitArgs& args) {
  absl::StatusOr<DatasetManifest> m = DatasetManifest::LoadFile(args.manifest);
  if (!m.ok()) return InputError(m.status());
  ProposeOptions options;
  options.seed = args.seed;
  options.max_iterations = args.max_iterations;
  options.restarts = args.restarts;
  options.constraints = ConstraintsFrom(args);
  absl::StatusOr<SplitProposal> proposal = ProposeSplit(*m, options);
  if (!proposal.ok()) return InputError(proposal.status());
  for (const std::string& c : proposal->infeasible_conditions) {
    std::cerr << "warning: condition " << c
              << " has too few sequences for the test-sequence ratio window\n";
  }
  if (absl::Status st = Emit(args.out, AssignmentCsv(proposal->assignment));
      !st.ok()) {
    return InputError(st);
  }
  if (!args.report_out.empty()) {
    if (absl::Status st =
            Emit(args.report_out, ConstraintReportJson(proposal->report));
        !st.ok()) {
      return InputError(st);
    }
  }
  LogFailures(proposal->report);
  if (!proposal->report.pass) {
    std::cerr << "error: no assignment satisfying every constraint was found\n";
    return kExitFailed;
  }
  return kExitOk;
}

absl::StatusOr<FrameLog> LoadFrameLog(const std::string& path) {
  absl::StatusOr<std::string> text = ReadFileToString(path);
  if (!text.ok()) return text.status();
  absl::StatusOr<FrameLog> log = ParseFrameLogCsv(*text);
  if (!log.ok()) {
    return absl::InvalidArgumentError(
        absl::StrCat(path, ": ", log.status().message()));
  }
  return log;
}

int RunDedup(const std::string& log_path, double threshold,
             const std::string& out) {
  absl::StatusOr<FrameLog> log = LoadFrameLog(log_path);
  if (!log.ok()) return InputError(log.status());
  absl::StatusOr<FrameLog> kept = DedupFrames(*log, threshold);
  if (!kept.ok()) return InputError(kept.status());
  spdlog::info("kept {} of {} frames", kept->size(), log->size());
  if (absl::Status st = Emit(out, FrameLogCsv(*kept)); !st.ok()) {
    return InputError(st);
  }
  return kExitOk;
}

struct MatchArgs {
  std::string log;
  std::string rgb;
  std::string nir;
  double max_skew = kDefaultMaxSkew;
  std::optional<double> dedup_threshold;
  std::string out;
  std::string unmatched_out;
};

int RunMatchPairs(const MatchArgs& args) {
  FrameLog rgb, nir;
  if (!args.log.empty()) {
    absl::StatusOr<FrameLog> log = LoadFrameLog(args.log);
    if (!log.ok()) return InputError(log.status());
    rgb = SelectStream(*log, Stream::kRgb);
    nir = SelectStream(*log, Stream::kNir);
  } else {
    absl::StatusOr<FrameLog> r = LoadFrameLog(args.rgb);
    if (!r.ok()) return InputError(r.status());
    absl::StatusOr<FrameLog> n = LoadFrameLog(args.nir);
    if (!n.ok()) return InputError(n.status());
    rgb = *std::move(r);
    nir = *std::move(n);
  }
  if (args.dedup_threshold) {
    absl::StatusOr<FrameLog> r = DedupFrames(rgb, *args.dedup_threshold);
    if (!r.ok()) return InputError(r.status());
    absl::StatusOr<FrameLog> n = DedupFrames(nir, *args.dedup_threshold);
    if (!n.ok()) return InputError(n.status());
    rgb = *std::move(r);
    nir = *std::move(n);
  }
  absl::StatusOr<PairManifest> pairs = MatchPairs(rgb, nir, args.max_skew);
  if (!pairs.ok()) return InputError(pairs.status());
  spdlog::info("{} pairs, {} rgb and {} nir frames unmatched",
               pairs->pairs.size(), pairs->unmatched_rgb.size(),
               pairs->unmatched_nir.size());
  if (absl::Status st = Emit(args.out, PairManifestCsv(*pairs)); !st.ok()) {
    return InputError(st);
  }
  if (!args.unmatched_out.empty()) {
    if (absl::Status st = Emit(args.unmatched_out, UnmatchedCsv(*pairs));
        !st.ok()) {
      return InputError(st);
    }
  }
  return kExitOk;
}

int Main(int argc, char** argv) {
  ConfigureLogging();
  CLI::App app{"Safety-aware semantic segmentation evaluation."};
  app.require_subcommand(1);

  EvaluateArgs ev;
  CLI::App* evaluate = app.add_subcommand(
      "evaluate", "Score predicted label maps against ground truth.");
  evaluate->add_option("--hierarchy", ev.hierarchy,
                       "Label hierarchy config (default: shipped IDD-AW)")
      ->check(CLI::ExistingFile);
  evaluate->add_option("--gt", ev.gt, "Ground-truth root directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  evaluate->add_option("--pred", ev.pred, "Prediction root directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  evaluate->add_option("--cimp", ev.cimp,
                       "Important classes: preset name or list file")
      ->capture_default_str();
  evaluate->add_option("--aggregation", ev.aggregation)
      ->check(CLI::IsMember({"dataset", "per-image"}))
      ->capture_default_str();
  evaluate->add_option("--presence", ev.presence,
                       "Absent classes: exclude, or count as zero")
      ->check(CLI::IsMember({"exclude", "zero"}))
      ->capture_default_str();
  evaluate->add_option("--condition", ev.condition,
                       "Evaluate only this top-level subdirectory");
  evaluate->add_option("--ignore", ev.ignore, "Ground-truth ignore value")
      ->check(CLI::Range(0, 65535))
      ->capture_default_str();
  evaluate->add_option("--jobs", ev.jobs, "Worker threads (0: all cores)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  evaluate->add_option("--out", ev.out, "Report path (default: stdout)");
  evaluate->add_option("--format", ev.format)
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  evaluate->add_flag("--by-condition", ev.by_condition,
                     "Add a per-condition table to the JSON report");
  evaluate->add_option("--table-out", ev.table_out,
                       "Condition table; .csv for full precision, text "
                       "otherwise");
  evaluate->add_option("--class-table-out", ev.class_table_out,
                       "Per-class IoU and SafeIoU by condition (CSV)");
  evaluate->add_option("--histogram", ev.histogram_out,
                       "Per-image mIoU/SmIoU histogram (CSV)");
  evaluate->add_option("--bin-width", ev.bin_width,
                       "Histogram bin width in percent")
      ->capture_default_str();
  evaluate->add_option("--color-table", ev.color_table,
                       "CSV r,g,b,class_index for RGB label maps")
      ->check(CLI::ExistingFile);
  evaluate->add_option("--raw-width", ev.raw_width, "Raw label-map width");
  evaluate->add_option("--raw-height", ev.raw_height, "Raw label-map height");
  evaluate->add_option("--raw-bits", ev.raw_bits, "Raw sample bits")
      ->check(CLI::IsMember({8, 16}))
      ->capture_default_str();
  // Accepted for a uniform command line; evaluation is deterministic.
  uint64_t unused_seed = 0;
  evaluate->add_option("--seed", unused_seed)->group("");

  std::string dist_hierarchy;
  std::vector<std::string> dist_pair;
  std::string dist_out;
  CLI::App* distances = app.add_subcommand(
      "distances", "Print tree distances between leaf classes.");
  distances->add_option("--hierarchy", dist_hierarchy)
      ->check(CLI::ExistingFile);
  distances->add_option("--pair", dist_pair, "Two class names")
      ->expected(2);
  distances->add_option("--out", dist_out, "Output path (default: stdout)");

  SplitArgs vs;
  CLI::App* validate = app.add_subcommand(
      "validate-split", "Check a train/test assignment against the ratio "
                        "windows.");
  SplitArgs ps;
  CLI::App* propose = app.add_subcommand(
      "propose-split", "Search for an assignment inside the ratio windows.");
  for (auto [cmd, args] : {std::pair{validate, &vs}, std::pair{propose, &ps}}) {
    cmd->add_option("--manifest", args->manifest, "Manifest CSV or JSON")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--scope", args->scope,
                    "Scope of the frame, instance and pixel windows")
        ->check(CLI::IsMember({"global", "per-condition"}))
        ->capture_default_str();
    cmd->add_option("--instance-mode", args->instance_mode)
        ->check(CLI::IsMember({"per-class", "aggregate"}))
        ->capture_default_str();
  }
  validate->add_option("--assignment", vs.assignment,
                       "CSV sequence_id,split")
      ->required()
      ->check(CLI::ExistingFile);
  validate->add_option("--out", vs.out, "Report JSON (default: stdout)");
  propose->add_option("--seed", ps.seed)->capture_default_str();
  propose->add_option("--max-iterations", ps.max_iterations,
                      "Swap steps per restart")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  propose->add_option("--restarts", ps.restarts)
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  propose->add_option("--out", ps.out, "Assignment CSV (default: stdout)");
  propose->add_option("--report", ps.report_out, "Constraint report JSON");

  std::string dedup_log, dedup_out;
  double dedup_threshold = 3.0;
  CLI::App* dedup =
      app.add_subcommand("dedup", "Drop frames closer than a time threshold.");
  dedup->add_option("--log", dedup_log, "Frame log CSV")
      ->required()
      ->check(CLI::ExistingFile);
  dedup->add_option("--threshold", dedup_threshold, "Seconds")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  dedup->add_option("--out", dedup_out, "Output path (default: stdout)");

  MatchArgs ma;
  CLI::App* match = app.add_subcommand(
      "match-pairs", "Pair RGB and NIR frames by nearest timestamp.");
  CLI::Option* log_opt =
      match->add_option("--log", ma.log, "Frame log with both streams")
          ->check(CLI::ExistingFile);
  CLI::Option* rgb_opt =
      match->add_option("--rgb", ma.rgb, "RGB frame log")
          ->check(CLI::ExistingFile);
  CLI::Option* nir_opt =
      match->add_option("--nir", ma.nir, "NIR frame log")
          ->check(CLI::ExistingFile);
  log_opt->excludes(rgb_opt)->excludes(nir_opt);
  rgb_opt->needs(nir_opt);
  nir_opt->needs(rgb_opt);
  match->add_option("--max-skew", ma.max_skew, "Seconds")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  match->add_option("--dedup-threshold", ma.dedup_threshold,
                    "Deduplicate both streams first");
  match->add_option("--out", ma.out, "Pair CSV (default: stdout)");
  match->add_option("--unmatched", ma.unmatched_out, "Unmatched frames CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInputError;
  }

  if (evaluate->parsed()) return RunEvaluate(ev);
  if (distances->parsed()) return RunDistances(dist_hierarchy, dist_pair, dist_out);
  if (validate->parsed()) return RunValidateSplit(vs);
  if (propose->parsed()) return RunProposeSplit(ps);
  if (dedup->parsed()) return RunDedup(dedup_log, dedup_threshold, dedup_out);
  if (match->parsed()) {
    if (ma.log.empty() && ma.rgb.empty()) {
      return InputError(absl::InvalidArgumentError(
          "match-pairs needs --log, or --rgb with --nir"));
    }
    return RunMatchPairs(ma);
  }
  return kExitInputError;
}

}  // namespace
}  // namespace safeseg

int main(int argc, char** argv) { return safeseg::Main(argc, argv); }
