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

#ifndef SAFESEG_HIERARCHY_H_
#define SAFESEG_HIERARCHY_H_

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"

namespace safeseg {

// One row of a hierarchy config. Level-1 nodes have an empty parent; their
// parent is the implicit virtual root.
struct HierarchyNode {
  std::string name;
  int level = 0;
  std::string parent;
  std::optional<int> class_index;
  bool important_default = false;
};

struct HierarchyParseOptions {
  // Pad leaves that are shallower than the deepest leaf with unary chains.
  // When false, leaves at different depths are rejected.
  bool pad_leaves = true;
};

// Subset of leaf class indices whose mispredictions are safety-critical.
class ImportantClassSet {
 public:
  ImportantClassSet() = default;

  static absl::StatusOr<ImportantClassSet> FromIndices(
      int num_classes, const std::vector<int>& indices);
  static ImportantClassSet None(int num_classes);
  static ImportantClassSet All(int num_classes);

  int num_classes() const { return static_cast<int>(members_.size()); }
  bool contains(int c) const { return members_[c]; }
  bool empty() const;
  int size() const;
  std::vector<int> indices() const;

  friend bool operator==(const ImportantClassSet&,
                         const ImportantClassSet&) = default;

 private:
  explicit ImportantClassSet(std::vector<bool> members)
      : members_(std::move(members)) {}
  std::vector<bool> members_;
};

// Rooted label taxonomy. Leaves are the evaluation classes, indexed
// 0..K-1. Immutable after construction.
//
// Config format (line based, '#' starts a comment line):
//
//   levels,<n>                       optional; penalty normaliser n
//   preset,<name>,<node>;<node>...   named important-class set
//   check,<leaf>,<leaf>,<distance>   asserted at load time
//   name,level,parent,class_index,important_default
//   <rows...>
//
// Directives precede the header row. Each row after the header declares one
// node. Leaves carry a class index and a 0/1 important flag; internal nodes
// leave both fields empty.
class LabelHierarchy {
 public:
  static absl::StatusOr<LabelHierarchy> Parse(
      absl::string_view document, const HierarchyParseOptions& options = {});
  static absl::StatusOr<LabelHierarchy> LoadFile(
      const std::string& path, const HierarchyParseOptions& options = {});
  // The IDD-AW taxonomy shipped in data/.
  static absl::StatusOr<LabelHierarchy> LoadDefault();

  // Canonical text form. Comment lines are kept in place, so a canonical
  // document round-trips byte for byte.
  std::string Serialize() const;

  int num_classes() const { return static_cast<int>(class_names_.size()); }
  // The normaliser n in d(c,s)/n.
  int num_levels() const { return num_levels_; }
  // Depth of every leaf below the virtual root after padding.
  int leaf_depth() const { return leaf_depth_; }

  const std::vector<HierarchyNode>& nodes() const { return nodes_; }
  const std::string& class_name(int c) const { return class_names_[c]; }
  const std::vector<std::string>& class_names() const { return class_names_; }
  absl::StatusOr<int> ClassIndex(absl::string_view name) const;
  std::vector<std::string> NodesAtLevel(int level) const;

  // Half the length of the tree path between two leaves.
  absl::StatusOr<int> TreeDistance(int c, int s) const;
  absl::StatusOr<int> TreeDistance(absl::string_view c,
                                   absl::string_view s) const;

  // Leaves below the named node, or the leaf itself.
  absl::StatusOr<std::vector<int>> ClassesUnder(absl::string_view node) const;

  ImportantClassSet DefaultImportant() const;
  const std::vector<std::pair<std::string, std::vector<std::string>>>&
  presets() const {
    return presets_;
  }
  // "all-safe" (the flagged default), "none", "all", or a config preset.
  absl::StatusOr<ImportantClassSet> ResolvePreset(absl::string_view name) const;

 private:
  struct Entry {
    enum class Kind { kVerbatim, kLevels, kPreset, kCheck, kHeader, kNode };
    Kind kind;
    std::string text;
    int index = -1;
  };
  struct Check {
    std::string a;
    std::string b;
    int distance;
  };

  LabelHierarchy() = default;
  absl::Status Build(const HierarchyParseOptions& options);

  std::vector<HierarchyNode> nodes_;
  std::vector<Entry> layout_;
  std::optional<int> declared_levels_;
  std::vector<std::pair<std::string, std::vector<std::string>>> presets_;
  std::vector<Check> checks_;

  int num_levels_ = 0;
  int leaf_depth_ = 0;
  std::vector<std::string> class_names_;
  std::vector<bool> important_default_;
  // Root-to-leaf node chain per class in the padded tree; entry 0 is the
  // virtual root. All chains have length leaf_depth_ + 1.
  std::vector<std::vector<int>> ancestry_;
  std::vector<int> node_of_class_;
};

// Pairwise tree distances between all leaf classes.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  explicit DistanceMatrix(const LabelHierarchy& hierarchy);
  // Row-major values; validated for symmetry, zero diagonal and range.
  static absl::StatusOr<DistanceMatrix> FromValues(int size, int num_levels,
                                                   std::vector<int> values);

  int size() const { return size_; }
  int num_levels() const { return num_levels_; }
  int operator()(int c, int s) const { return values_[c * size_ + s]; }
  int max() const;

 private:
  int size_ = 0;
  int num_levels_ = 1;
  std::vector<int> values_;
};

}  // namespace safeseg

#endif  // SAFESEG_HIERARCHY_H_
