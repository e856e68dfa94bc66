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

// Reference implementations and generators shared by the test binaries.
// The oracles work from raw label vectors and node lists and never touch the
// confusion matrix or the distance code under test.

#ifndef SAFESEG_TESTS_TESTING_ORACLE_H_
#define SAFESEG_TESTS_TESTING_ORACLE_H_

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iterator>
#include <map>
#include <optional>
#include <queue>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "absl/strings/str_cat.h"
#include "safeseg/confusion.h"
#include "safeseg/hierarchy.h"

namespace safeseg::testing {

// Bounded integer in [lo, hi], independent of std distributions.
inline int RandInt(std::mt19937_64& rng, int lo, int hi) {
  return lo + static_cast<int>(rng() % static_cast<uint64_t>(hi - lo + 1));
}

inline bool Coin(std::mt19937_64& rng, int percent) {
  return RandInt(rng, 0, 99) < percent;
}

// Tree distance by breadth-first search over an explicitly built tree in
// which every leaf shallower than the deepest one hangs below a unary chain.
inline int OracleTreeDistance(const LabelHierarchy& h, int c, int s) {
  const std::vector<HierarchyNode>& nodes = h.nodes();
  int depth = 0;
  for (const HierarchyNode& n : nodes) {
    if (n.class_index) depth = std::max(depth, n.level);
  }
  std::map<std::string, int> id;
  id[""] = 0;
  for (const HierarchyNode& n : nodes) id.emplace(n.name, id.size());
  std::vector<std::vector<int>> adj(id.size());
  auto link = [&adj](int a, int b) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  };
  int leaf_c = -1, leaf_s = -1;
  for (const HierarchyNode& n : nodes) {
    int parent = id.at(n.parent);
    if (n.class_index) {
      for (int l = n.level; l < depth; ++l) {
        adj.emplace_back();
        const int pad = static_cast<int>(adj.size()) - 1;
        link(parent, pad);
        parent = pad;
      }
      if (*n.class_index == c) leaf_c = id.at(n.name);
      if (*n.class_index == s) leaf_s = id.at(n.name);
    }
    link(parent, id.at(n.name));
  }
  std::vector<int> dist(adj.size(), -1);
  std::queue<int> q;
  dist[leaf_c] = 0;
  q.push(leaf_c);
  while (!q.empty()) {
    const int u = q.front();
    q.pop();
    for (int v : adj[u]) {
      if (dist[v] < 0) {
        dist[v] = dist[u] + 1;
        q.push(v);
      }
    }
  }
  return dist[leaf_s] / 2;
}

struct OracleScores {
  std::vector<std::optional<double>> iou;
  std::vector<std::optional<double>> safe_iou;
  std::optional<double> miou;
  std::optional<double> smiou;
};

// Metrics straight from per-pixel index sets. A class enters the means when
// its ground-truth set is non-empty.
inline OracleScores OracleMetrics(const std::vector<int>& gt,
                                  const std::vector<int>& pred, int k,
                                  int ignore,
                                  const std::vector<std::vector<int>>& dist,
                                  int n, const std::vector<bool>& important,
                                  bool absent_as_zero = false) {
  std::vector<std::set<size_t>> gt_set(k), pred_set(k);
  for (size_t i = 0; i < gt.size(); ++i) {
    if (gt[i] == ignore) continue;
    gt_set[gt[i]].insert(i);
    pred_set[pred[i]].insert(i);
  }
  auto intersect = [](const std::set<size_t>& a, const std::set<size_t>& b) {
    std::vector<size_t> out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                          std::back_inserter(out));
    return static_cast<double>(out.size());
  };
  auto unite = [](const std::set<size_t>& a, const std::set<size_t>& b) {
    std::vector<size_t> out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(),
                   std::back_inserter(out));
    return static_cast<double>(out.size());
  };
  OracleScores out;
  out.iou.resize(k);
  out.safe_iou.resize(k);
  double iou_sum = 0.0, safe_sum = 0.0;
  int present = 0;
  for (int c = 0; c < k; ++c) {
    if (gt_set[c].empty()) continue;
    const double u = unite(gt_set[c], pred_set[c]);
    const double iou = intersect(gt_set[c], pred_set[c]) / u;
    double safe = iou;
    for (int s = 0; s < k; ++s) {
      if (s == c || (!important[c] && !important[s])) continue;
      safe -= (static_cast<double>(dist[c][s]) / n) *
              (intersect(gt_set[c], pred_set[s]) / u);
    }
    out.iou[c] = iou;
    out.safe_iou[c] = safe;
    iou_sum += iou;
    safe_sum += safe;
    ++present;
  }
  if (present > 0) {
    const int denom = absent_as_zero ? k : present;
    out.miou = iou_sum / denom;
    out.smiou = safe_sum / denom;
  }
  return out;
}

struct RandomHierarchy {
  std::string config;
  int num_classes = 0;
  int leaf_depth = 0;
  int num_levels = 0;
};

// Random tree with `num_classes` leaves at depths 1..max_depth and at least
// two level-1 groups. With `extra_levels` > 0 the declared normaliser
// exceeds the leaf depth.
inline RandomHierarchy MakeRandomHierarchy(std::mt19937_64& rng,
                                           int num_classes, int max_depth,
                                           int extra_levels = 0) {
  struct Internal {
    std::string name;
    int level;
    std::string parent;
  };
  std::vector<Internal> internal;
  std::map<std::string, std::vector<int>> children;  // parent -> internal ids
  std::vector<std::string> leaf_rows;
  int deepest = 0;
  for (int leaf = 0; leaf < num_classes; ++leaf) {
    int depth = RandInt(rng, 1, max_depth);
    if (num_classes >= 2 && leaf < 2) depth = std::max(depth, 2);
    std::string parent;
    for (int level = 1; level < depth; ++level) {
      std::vector<int>& options = children[parent];
      const bool fresh = options.empty() || Coin(rng, 35) ||
                         (level == 1 && leaf == 1 && options.size() == 1);
      int pick;
      if (fresh) {
        pick = static_cast<int>(internal.size());
        internal.push_back(
            {absl::StrCat("g", level, "_", internal.size()), level, parent});
        options.push_back(pick);
      } else {
        pick = options[RandInt(rng, 0, static_cast<int>(options.size()) - 1)];
      }
      parent = internal[pick].name;
    }
    deepest = std::max(deepest, depth);
    leaf_rows.push_back(absl::StrCat("L", leaf, ",", depth, ",", parent, ",",
                                     leaf, ",", Coin(rng, 50) ? 1 : 0));
  }
  RandomHierarchy out;
  out.num_classes = num_classes;
  out.leaf_depth = deepest;
  out.num_levels = deepest + extra_levels;
  if (extra_levels > 0) absl::StrAppend(&out.config, "levels,", out.num_levels, "\n");
  absl::StrAppend(&out.config, "name,level,parent,class_index,important_default\n");
  for (const Internal& g : internal) {
    absl::StrAppend(&out.config, g.name, ",", g.level, ",", g.parent, ",,\n");
  }
  for (const std::string& row : leaf_rows) absl::StrAppend(&out.config, row, "\n");
  return out;
}

// Blocky random label map: rectangles of random classes, with an optional
// share of ignore pixels.
inline LabelMap RandomLabelMap(std::mt19937_64& rng, int width, int height,
                               int num_classes, int ignore_percent = 0,
                               int ignore = kDefaultIgnoreLabel) {
  std::vector<uint16_t> v(static_cast<size_t>(width) * height);
  for (auto& x : v) {
    x = Coin(rng, ignore_percent) ? ignore : RandInt(rng, 0, num_classes - 1);
  }
  return *LabelMap::Create(width, height, std::move(v));
}

// Prediction that agrees with `gt` on roughly `agree_percent` of pixels.
inline LabelMap PerturbLabelMap(std::mt19937_64& rng, const LabelMap& gt,
                                int num_classes, int agree_percent) {
  std::vector<uint16_t> v(gt.values().begin(), gt.values().end());
  for (auto& x : v) {
    if (x >= num_classes || !Coin(rng, 100 - agree_percent)) {
      if (x >= num_classes) x = RandInt(rng, 0, num_classes - 1);
      continue;
    }
    x = RandInt(rng, 0, num_classes - 1);
  }
  return *LabelMap::Create(gt.width(), gt.height(), std::move(v));
}

inline std::vector<int> ToInts(const LabelMap& m) {
  return {m.values().begin(), m.values().end()};
}

// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            absl::StrCat("safeseg_", tag, "_", rd(), rd());
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string Sub(const std::string& rel) const { return (path_ / rel).string(); }

 private:
  std::filesystem::path path_;
};

}  // namespace safeseg::testing

#endif  // SAFESEG_TESTS_TESTING_ORACLE_H_
