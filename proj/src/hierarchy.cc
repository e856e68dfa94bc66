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

#include "safeseg/hierarchy.h"

#include <algorithm>
#include <unordered_map>

#include "absl/status/status.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "absl/strings/strip.h"
#include "safeseg/file_util.h"

namespace safeseg {
namespace {

constexpr absl::string_view kHeader =
    "name,level,parent,class_index,important_default";

std::vector<std::string> SplitFields(absl::string_view line, char sep) {
  std::vector<std::string> fields;
  for (absl::string_view f : absl::StrSplit(line, sep)) {
    fields.emplace_back(absl::StripAsciiWhitespace(f));
  }
  return fields;
}

absl::Status LineError(int line_no, absl::string_view what) {
  return absl::InvalidArgumentError(
      absl::StrCat("hierarchy line ", line_no, ": ", what));
}

bool IsBuiltinPreset(absl::string_view name) {
  return name == "all-safe" || name == "none" || name == "all";
}

}  // namespace

absl::StatusOr<ImportantClassSet> ImportantClassSet::FromIndices(
    int num_classes, const std::vector<int>& indices) {
  std::vector<bool> members(num_classes, false);
  for (int c : indices) {
    if (c < 0 || c >= num_classes) {
      return absl::InvalidArgumentError(absl::StrCat(
          "important class ", c, " outside 0..", num_classes - 1));
    }
    members[c] = true;
  }
  return ImportantClassSet(std::move(members));
}

ImportantClassSet ImportantClassSet::None(int num_classes) {
  return ImportantClassSet(std::vector<bool>(num_classes, false));
}

ImportantClassSet ImportantClassSet::All(int num_classes) {
  return ImportantClassSet(std::vector<bool>(num_classes, true));
}

bool ImportantClassSet::empty() const { return size() == 0; }

int ImportantClassSet::size() const {
  return static_cast<int>(std::count(members_.begin(), members_.end(), true));
}

std::vector<int> ImportantClassSet::indices() const {
  std::vector<int> out;
  for (int c = 0; c < num_classes(); ++c) {
    if (members_[c]) out.push_back(c);
  }
  return out;
}

absl::StatusOr<LabelHierarchy> LabelHierarchy::Parse(
    absl::string_view document, const HierarchyParseOptions& options) {
  LabelHierarchy h;
  bool seen_header = false;
  int line_no = 0;
  std::vector<absl::string_view> lines = absl::StrSplit(document, '\n');
  if (!lines.empty() && lines.back().empty()) lines.pop_back();

  for (absl::string_view raw : lines) {
    ++line_no;
    absl::string_view line = absl::StripSuffix(raw, "\r");
    absl::string_view stripped = absl::StripAsciiWhitespace(line);
    if (stripped.empty() || stripped.front() == '#') {
      h.layout_.push_back({Entry::Kind::kVerbatim, std::string(line)});
      continue;
    }
    std::vector<std::string> f = SplitFields(stripped, ',');
    if (!seen_header) {
      if (absl::StrJoin(f, ",") == kHeader) {
        seen_header = true;
        h.layout_.push_back({Entry::Kind::kHeader, ""});
      } else if (f[0] == "levels") {
        int n = 0;
        if (f.size() != 2 || !absl::SimpleAtoi(f[1], &n) || n < 1) {
          return LineError(line_no, "expected 'levels,<positive int>'");
        }
        if (h.declared_levels_) {
          return LineError(line_no, "duplicate levels directive");
        }
        h.declared_levels_ = n;
        h.layout_.push_back({Entry::Kind::kLevels, ""});
      } else if (f[0] == "preset") {
        if (f.size() != 3 || f[1].empty() || f[2].empty()) {
          return LineError(line_no, "expected 'preset,<name>,<node>;...'");
        }
        if (IsBuiltinPreset(f[1])) {
          return LineError(line_no,
                           absl::StrCat("preset name '", f[1], "' is reserved"));
        }
        h.layout_.push_back({Entry::Kind::kPreset, "",
                             static_cast<int>(h.presets_.size())});
        h.presets_.emplace_back(f[1], SplitFields(f[2], ';'));
      } else if (f[0] == "check") {
        int d = 0;
        if (f.size() != 4 || !absl::SimpleAtoi(f[3], &d)) {
          return LineError(line_no, "expected 'check,<leaf>,<leaf>,<int>'");
        }
        h.layout_.push_back({Entry::Kind::kCheck, "",
                             static_cast<int>(h.checks_.size())});
        h.checks_.push_back({f[1], f[2], d});
      } else {
        return LineError(line_no, "unexpected line before header row");
      }
      continue;
    }

    if (f.size() != 5) {
      return LineError(line_no, absl::StrCat("expected 5 fields, got ",
                                             f.size()));
    }
    HierarchyNode node;
    node.name = f[0];
    node.parent = f[2];
    if (node.name.empty()) return LineError(line_no, "empty node name");
    if (!absl::SimpleAtoi(f[1], &node.level)) {
      return LineError(line_no, absl::StrCat("bad level '", f[1], "'"));
    }
    if (!f[3].empty()) {
      int idx = 0;
      if (!absl::SimpleAtoi(f[3], &idx) || idx < 0) {
        return LineError(line_no, absl::StrCat("bad class_index '", f[3], "'"));
      }
      node.class_index = idx;
    }
    if (f[4] == "1") {
      node.important_default = true;
    } else if (!f[4].empty() && f[4] != "0") {
      return LineError(line_no,
                       absl::StrCat("bad important_default '", f[4], "'"));
    }
    h.layout_.push_back(
        {Entry::Kind::kNode, "", static_cast<int>(h.nodes_.size())});
    h.nodes_.push_back(std::move(node));
  }
  if (!seen_header) {
    return absl::InvalidArgumentError("hierarchy: missing header row");
  }
  absl::Status st = h.Build(options);
  if (!st.ok()) return st;
  return h;
}

absl::Status LabelHierarchy::Build(const HierarchyParseOptions& options) {
  const int n_nodes = static_cast<int>(nodes_.size());
  if (n_nodes == 0) return absl::InvalidArgumentError("hierarchy: no nodes");

  std::unordered_map<std::string, int> by_name;
  for (int i = 0; i < n_nodes; ++i) {
    if (!by_name.emplace(nodes_[i].name, i).second) {
      return absl::InvalidArgumentError(
          absl::StrCat("duplicate node name '", nodes_[i].name, "'"));
    }
  }

  std::vector<int> parent(n_nodes, -1);
  for (int i = 0; i < n_nodes; ++i) {
    const HierarchyNode& node = nodes_[i];
    if (node.parent.empty()) continue;
    auto it = by_name.find(node.parent);
    if (it == by_name.end()) {
      return absl::InvalidArgumentError(absl::StrCat(
          "node '", node.name, "' has unknown parent '", node.parent, "'"));
    }
    parent[i] = it->second;
  }

  for (int i = 0; i < n_nodes; ++i) {
    int steps = 0;
    for (int p = parent[i]; p != -1; p = parent[p]) {
      if (++steps > n_nodes) {
        return absl::InvalidArgumentError(absl::StrCat(
            "cycle detected in parent links through '", nodes_[i].name, "'"));
      }
    }
  }

  for (int i = 0; i < n_nodes; ++i) {
    const HierarchyNode& node = nodes_[i];
    const int expected = parent[i] == -1 ? 1 : nodes_[parent[i]].level + 1;
    if (node.level != expected) {
      return absl::InvalidArgumentError(absl::StrCat(
          "node '", node.name, "' has level ", node.level, " but its ",
          parent[i] == -1 ? "parent is the root" : "parent is at level ",
          parent[i] == -1 ? "" : absl::StrCat(nodes_[parent[i]].level),
          "; expected level ", expected));
    }
  }

  std::vector<int> child_count(n_nodes, 0);
  for (int i = 0; i < n_nodes; ++i) {
    if (parent[i] != -1) ++child_count[parent[i]];
  }

  int num_leaves = 0;
  for (int i = 0; i < n_nodes; ++i) {
    const HierarchyNode& node = nodes_[i];
    const bool leaf = child_count[i] == 0;
    if (leaf && !node.class_index) {
      return absl::InvalidArgumentError(
          absl::StrCat("leaf '", node.name, "' has no class_index"));
    }
    if (!leaf && node.class_index) {
      return absl::InvalidArgumentError(absl::StrCat(
          "internal node '", node.name, "' must not carry a class_index"));
    }
    if (!leaf && node.important_default) {
      return absl::InvalidArgumentError(absl::StrCat(
          "internal node '", node.name, "' must not set important_default"));
    }
    if (leaf) ++num_leaves;
  }

  node_of_class_.assign(num_leaves, -1);
  int leaf_depth = 0;
  for (int i = 0; i < n_nodes; ++i) {
    if (child_count[i] != 0) continue;
    const int idx = *nodes_[i].class_index;
    if (idx >= num_leaves) {
      return absl::InvalidArgumentError(
          absl::StrCat("class_index ", idx, " of '", nodes_[i].name,
                       "' outside 0..", num_leaves - 1));
    }
    if (node_of_class_[idx] != -1) {
      return absl::InvalidArgumentError(absl::StrCat(
          "duplicate class_index ", idx, " ('",
          nodes_[node_of_class_[idx]].name, "' and '", nodes_[i].name, "')"));
    }
    node_of_class_[idx] = i;
    leaf_depth = std::max(leaf_depth, nodes_[i].level);
  }

  for (int c = 0; c < num_leaves; ++c) {
    const HierarchyNode& leaf = nodes_[node_of_class_[c]];
    if (leaf.level != leaf_depth && !options.pad_leaves) {
      return absl::InvalidArgumentError(absl::StrCat(
          "leaf '", leaf.name, "' at depth ", leaf.level,
          " but other leaves reach depth ", leaf_depth,
          " (padding disabled)"));
    }
  }
  if (declared_levels_ && *declared_levels_ < leaf_depth) {
    return absl::InvalidArgumentError(
        absl::StrCat("levels ", *declared_levels_,
                     " is smaller than the leaf depth ", leaf_depth));
  }
  leaf_depth_ = leaf_depth;
  num_levels_ = declared_levels_.value_or(leaf_depth);

  // Tree ids: 0 is the virtual root, 1..n_nodes mirror nodes_, padding
  // nodes follow.
  int next_id = n_nodes + 1;
  class_names_.resize(num_leaves);
  important_default_.resize(num_leaves);
  ancestry_.assign(num_leaves, {});
  for (int c = 0; c < num_leaves; ++c) {
    const int leaf = node_of_class_[c];
    class_names_[c] = nodes_[leaf].name;
    important_default_[c] = nodes_[leaf].important_default;
    std::vector<int> chain;
    for (int p = parent[leaf]; p != -1; p = parent[p]) chain.push_back(p + 1);
    chain.push_back(0);
    std::reverse(chain.begin(), chain.end());
    for (int k = nodes_[leaf].level; k < leaf_depth; ++k) {
      chain.push_back(next_id++);
    }
    chain.push_back(leaf + 1);
    ancestry_[c] = std::move(chain);
  }

  for (const auto& [name, members] : presets_) {
    for (const std::string& m : members) {
      if (!by_name.contains(m)) {
        return absl::InvalidArgumentError(
            absl::StrCat("preset '", name, "' names unknown node '", m, "'"));
      }
    }
  }
  for (const Check& check : checks_) {
    absl::StatusOr<int> d = TreeDistance(check.a, check.b);
    if (!d.ok()) return d.status();
    if (*d != check.distance) {
      return absl::FailedPreconditionError(absl::StrCat(
          "self-check failed: distance(", check.a, ", ", check.b, ") is ", *d,
          ", config asserts ", check.distance));
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<LabelHierarchy> LabelHierarchy::LoadFile(
    const std::string& path, const HierarchyParseOptions& options) {
  absl::StatusOr<std::string> text = ReadFileToString(path);
  if (!text.ok()) return text.status();
  absl::StatusOr<LabelHierarchy> h = Parse(*text, options);
  if (!h.ok()) {
    return absl::Status(h.status().code(),
                        absl::StrCat(path, ": ", h.status().message()));
  }
  return h;
}

absl::StatusOr<LabelHierarchy> LabelHierarchy::LoadDefault() {
  return LoadFile(SAFESEG_DEFAULT_HIERARCHY);
}

std::string LabelHierarchy::Serialize() const {
  std::string out;
  for (const Entry& e : layout_) {
    switch (e.kind) {
      case Entry::Kind::kVerbatim:
        absl::StrAppend(&out, e.text);
        break;
      case Entry::Kind::kLevels:
        absl::StrAppend(&out, "levels,", *declared_levels_);
        break;
      case Entry::Kind::kPreset: {
        const auto& [name, members] = presets_[e.index];
        absl::StrAppend(&out, "preset,", name, ",",
                        absl::StrJoin(members, ";"));
        break;
      }
      case Entry::Kind::kCheck: {
        const Check& c = checks_[e.index];
        absl::StrAppend(&out, "check,", c.a, ",", c.b, ",", c.distance);
        break;
      }
      case Entry::Kind::kHeader:
        absl::StrAppend(&out, kHeader);
        break;
      case Entry::Kind::kNode: {
        const HierarchyNode& n = nodes_[e.index];
        absl::StrAppend(&out, n.name, ",", n.level, ",", n.parent, ",");
        if (n.class_index) {
          absl::StrAppend(&out, *n.class_index, ",",
                          n.important_default ? "1" : "0");
        } else {
          absl::StrAppend(&out, ",");
        }
        break;
      }
    }
    out.push_back('\n');
  }
  return out;
}

absl::StatusOr<int> LabelHierarchy::ClassIndex(absl::string_view name) const {
  for (int c = 0; c < num_classes(); ++c) {
    if (class_names_[c] == name) return c;
  }
  return absl::NotFoundError(absl::StrCat("unknown leaf '", name, "'"));
}

std::vector<std::string> LabelHierarchy::NodesAtLevel(int level) const {
  std::vector<std::string> out;
  for (const HierarchyNode& n : nodes_) {
    if (n.level == level) out.push_back(n.name);
  }
  return out;
}

absl::StatusOr<int> LabelHierarchy::TreeDistance(int c, int s) const {
  if (c < 0 || c >= num_classes() || s < 0 || s >= num_classes()) {
    return absl::NotFoundError(absl::StrCat("unknown leaf index ",
                                            (c < 0 || c >= num_classes()) ? c : s));
  }
  const std::vector<int>& a = ancestry_[c];
  const std::vector<int>& b = ancestry_[s];
  int common = 0;
  while (common < static_cast<int>(a.size()) && a[common] == b[common]) {
    ++common;
  }
  // The chains share the root, so the lowest common ancestor sits at depth
  // common - 1 and each leaf is leaf_depth_ below the root.
  return leaf_depth_ - (common - 1);
}

absl::StatusOr<int> LabelHierarchy::TreeDistance(absl::string_view c,
                                                 absl::string_view s) const {
  absl::StatusOr<int> ci = ClassIndex(c);
  if (!ci.ok()) return ci.status();
  absl::StatusOr<int> si = ClassIndex(s);
  if (!si.ok()) return si.status();
  return TreeDistance(*ci, *si);
}

absl::StatusOr<std::vector<int>> LabelHierarchy::ClassesUnder(
    absl::string_view node) const {
  int id = -1;
  for (int i = 0; i < static_cast<int>(nodes_.size()); ++i) {
    if (nodes_[i].name == node) id = i + 1;
  }
  if (id == -1) {
    return absl::NotFoundError(absl::StrCat("unknown node '", node, "'"));
  }
  std::vector<int> out;
  for (int c = 0; c < num_classes(); ++c) {
    const std::vector<int>& chain = ancestry_[c];
    if (std::find(chain.begin(), chain.end(), id) != chain.end()) {
      out.push_back(c);
    }
  }
  return out;
}

ImportantClassSet LabelHierarchy::DefaultImportant() const {
  std::vector<int> idx;
  for (int c = 0; c < num_classes(); ++c) {
    if (important_default_[c]) idx.push_back(c);
  }
  return *ImportantClassSet::FromIndices(num_classes(), idx);
}

absl::StatusOr<ImportantClassSet> LabelHierarchy::ResolvePreset(
    absl::string_view name) const {
  if (name == "all-safe") return DefaultImportant();
  if (name == "none") return ImportantClassSet::None(num_classes());
  if (name == "all") return ImportantClassSet::All(num_classes());
  for (const auto& [preset, members] : presets_) {
    if (preset != name) continue;
    std::vector<int> idx;
    for (const std::string& m : members) {
      absl::StatusOr<std::vector<int>> under = ClassesUnder(m);
      if (!under.ok()) return under.status();
      idx.insert(idx.end(), under->begin(), under->end());
    }
    return ImportantClassSet::FromIndices(num_classes(), idx);
  }
  return absl::NotFoundError(absl::StrCat("unknown preset '", name, "'"));
}

DistanceMatrix::DistanceMatrix(const LabelHierarchy& hierarchy)
    : size_(hierarchy.num_classes()),
      num_levels_(hierarchy.num_levels()),
      values_(static_cast<size_t>(size_) * size_, 0) {
  for (int c = 0; c < size_; ++c) {
    for (int s = c + 1; s < size_; ++s) {
      const int d = *hierarchy.TreeDistance(c, s);
      values_[c * size_ + s] = d;
      values_[s * size_ + c] = d;
    }
  }
}

absl::StatusOr<DistanceMatrix> DistanceMatrix::FromValues(
    int size, int num_levels, std::vector<int> values) {
  if (size < 1 || num_levels < 1 ||
      values.size() != static_cast<size_t>(size) * size) {
    return absl::InvalidArgumentError("distance matrix: bad shape");
  }
  for (int c = 0; c < size; ++c) {
    if (values[c * size + c] != 0) {
      return absl::InvalidArgumentError("distance matrix: nonzero diagonal");
    }
    for (int s = 0; s < size; ++s) {
      const int d = values[c * size + s];
      if (d != values[s * size + c] || d < 0 || d > num_levels) {
        return absl::InvalidArgumentError(absl::StrCat(
            "distance matrix: entry (", c, ",", s, ") invalid"));
      }
    }
  }
  DistanceMatrix m;
  m.size_ = size;
  m.num_levels_ = num_levels;
  m.values_ = std::move(values);
  return m;
}

int DistanceMatrix::max() const {
  return values_.empty() ? 0 : *std::max_element(values_.begin(), values_.end());
}

}  // namespace safeseg
