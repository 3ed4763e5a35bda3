/*
 * Copyright 2026 The deepforest Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef DEEPFOREST_TREE_H_
#define DEEPFOREST_TREE_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "deepforest/dataset.h"
#include "deepforest/rng.h"

namespace deepforest {

// Per-class probability estimate. Components are >= 0 and sum to 1.
using ClassVector = std::vector<double>;

enum class TreeKind : uint8_t {
  kGiniSplit = 0,         // best gini split among a random feature subset
  kCompletelyRandom = 1,  // random feature, random threshold
};

struct MaxFeatures {
  enum class Mode : uint8_t { kSqrt = 0, kAll = 1, kExplicit = 2 };

  Mode mode = Mode::kSqrt;
  std::size_t count = 0;  // used by kExplicit

  static MaxFeatures Sqrt() { return {Mode::kSqrt, 0}; }
  static MaxFeatures All() { return {Mode::kAll, 0}; }
  static MaxFeatures Explicit(std::size_t k) { return {Mode::kExplicit, k}; }

  // Number of candidate features for a node of a d-feature problem, in
  // [1, d]. kSqrt is floor(sqrt(d)).
  std::size_t Resolve(std::size_t n_features) const;

  bool operator==(const MaxFeatures&) const = default;
};

struct TreeConfig {
  TreeKind kind = TreeKind::kGiniSplit;
  MaxFeatures max_features;  // ignored by completely-random trees
  // Nodes at this depth become leaves (the root has depth 0).
  std::optional<uint32_t> depth_cap;
  uint64_t seed = 0;

  bool operator==(const TreeConfig&) const = default;
};

// Column-major copy of a feature matrix plus labels; the layout tree growth
// reads. Built once and shared by every tree of a forest.
class ColumnarData {
 public:
  ColumnarData(const FeatureMatrix& features, std::span<const uint32_t> labels,
               std::size_t n_classes);
  explicit ColumnarData(const Dataset& ds);

  std::size_t n_rows() const { return n_rows_; }
  std::size_t n_features() const { return n_features_; }
  std::size_t n_classes() const { return n_classes_; }

  double value(std::size_t feature, std::size_t row) const {
    return columns_[feature * n_rows_ + row];
  }
  std::span<const double> column(std::size_t feature) const {
    return {columns_.data() + feature * n_rows_, n_rows_};
  }
  uint32_t label(std::size_t row) const { return labels_[row]; }
  std::span<const uint32_t> labels() const { return labels_; }

 private:
  std::size_t n_rows_;
  std::size_t n_features_;
  std::size_t n_classes_;
  std::vector<double> columns_;
  std::vector<uint32_t> labels_;
};

// 1 - sum_i (c_i / n)^2. Throws InvalidArgumentError on all-zero counts.
double Gini(std::span<const uint32_t> class_counts);

struct GiniSplit {
  std::size_t feature = 0;
  double threshold = 0.0;
  double gain = 0.0;  // decrease of weighted gini impurity
};

// Best impurity-decreasing split over `candidate_features`, thresholds at
// midpoints between consecutive distinct values. Gains are compared exactly
// (integer arithmetic), ties go to the lowest feature index and then the
// lowest threshold. Returns nullopt when no split has positive gain.
std::optional<GiniSplit> BestGiniSplit(const ColumnarData& data,
                                       std::span<const std::size_t> rows,
                                       std::span<const std::size_t> candidate_features);

struct RandomSplit {
  std::size_t feature = 0;
  double threshold = 0.0;
};

// Feature uniform among those non-constant on `rows`, threshold uniform in
// the open (min, max) range of that feature. Both sides receive at least one
// row. nullopt when every feature is constant on `rows`.
std::optional<RandomSplit> ChooseRandomSplit(const ColumnarData& data,
                                             std::span<const std::size_t> rows,
                                             Rng& rng);
std::optional<RandomSplit> ChooseRandomSplit(const ColumnarData& data,
                                             std::span<const std::size_t> rows,
                                             uint64_t seed);

// Binary classification tree stored as a flat pre-order node array.
// Routing rule: x[feature] <= threshold goes left.
class Tree {
 public:
  struct Node {
    int32_t feature;   // >= 0 for internal nodes, -1 for leaves
    uint32_t link;     // internal: index of the right child; leaf: leaf id
    double threshold;  // internal nodes only

    bool is_leaf() const { return feature < 0; }
  };
  static_assert(sizeof(Node) == 16);

  struct LeafEntry {
    uint32_t label;
    uint32_t count;
    bool operator==(const LeafEntry&) const = default;
  };

  Tree() = default;

  // Grows a tree on `rows` (duplicates allowed, e.g. bootstrap samples).
  // Stops at pure nodes, at the depth cap, or when no split exists.
  static Tree Grow(const ColumnarData& data, std::span<const std::size_t> rows,
                   const TreeConfig& config);
  static Tree Grow(const Dataset& ds, std::span<const std::size_t> rows,
                   const TreeConfig& config);

  std::size_t n_classes() const { return n_classes_; }
  std::size_t n_features() const { return n_features_; }
  std::span<const Node> nodes() const { return nodes_; }
  std::size_t n_leaves() const { return leaf_offsets_.empty() ? 0 : leaf_offsets_.size() - 1; }
  std::size_t Depth() const;

  // Non-zero class counts of a leaf, ascending by label.
  std::span<const LeafEntry> leaf_entries(uint32_t leaf) const {
    return {entries_.data() + leaf_offsets_[leaf],
            entries_.data() + leaf_offsets_[leaf + 1]};
  }

  uint32_t FindLeaf(std::span<const double> x) const;

  // Normalized class counts of the leaf reached by x.
  ClassVector LeafDistribution(std::span<const double> x) const;
  // Adds the leaf distribution of x to `out` (size n_classes); no checks.
  void AccumulateDistribution(std::span<const double> x, std::span<double> out) const;

  bool operator==(const Tree&) const;

 private:
  friend class TreeBuilder;

  std::size_t n_classes_ = 0;
  std::size_t n_features_ = 0;
  std::vector<Node> nodes_;
  std::vector<uint32_t> leaf_offsets_;
  std::vector<LeafEntry> entries_;
};

// Assembles a Tree from nodes given in pre-order (node, left subtree, right
// subtree). Used by growth, deserialization and hand-built test trees.
class TreeBuilder {
 public:
  TreeBuilder(std::size_t n_classes, std::size_t n_features);

  void AddInternal(uint32_t feature, double threshold);
  // Dense class counts of length n_classes; sum must be >= 1.
  void AddLeaf(std::span<const uint32_t> class_counts);
  // Sparse form; labels strictly ascending, counts > 0.
  void AddLeafEntries(std::span<const Tree::LeafEntry> entries);

  bool complete() const { return started_ && open_.empty(); }
  Tree Finish();

 private:
  struct Open {
    uint32_t index;
    bool left_done;
  };
  void PlaceNode();
  void CloseSubtree();

  Tree tree_;
  std::vector<Open> open_;
  bool started_ = false;
};

}  // namespace deepforest

#endif  // DEEPFOREST_TREE_H_
