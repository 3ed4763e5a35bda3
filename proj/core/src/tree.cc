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

#include "deepforest/tree.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "deepforest/error.h"

namespace deepforest {

std::size_t MaxFeatures::Resolve(std::size_t n_features) const {
  if (n_features == 0) return 0;
  std::size_t k = n_features;
  switch (mode) {
    case Mode::kSqrt:
      k = static_cast<std::size_t>(std::sqrt(static_cast<double>(n_features)));
      break;
    case Mode::kAll:
      break;
    case Mode::kExplicit:
      k = count;
      break;
  }
  return std::clamp<std::size_t>(k, 1, n_features);
}

ColumnarData::ColumnarData(const FeatureMatrix& features,
                           std::span<const uint32_t> labels, std::size_t n_classes)
    : n_rows_(features.rows()),
      n_features_(features.cols()),
      n_classes_(n_classes),
      columns_(features.rows() * features.cols()),
      labels_(labels.begin(), labels.end()) {
  if (labels_.size() != n_rows_) {
    throw InvalidArgumentError("ColumnarData: label count differs from row count");
  }
  for (std::size_t i = 0; i < n_rows_; ++i) {
    const auto row = features.row(i);
    for (std::size_t j = 0; j < n_features_; ++j) columns_[j * n_rows_ + i] = row[j];
  }
}

ColumnarData::ColumnarData(const Dataset& ds)
    : ColumnarData(ds.features(), ds.labels(), ds.n_classes()) {}

double Gini(std::span<const uint32_t> class_counts) {
  uint64_t n = 0;
  for (const auto c : class_counts) n += c;
  if (n == 0) throw InvalidArgumentError("Gini: class counts sum to zero");
  double sum_sq = 0.0;
  for (const auto c : class_counts) {
    const double p = static_cast<double>(c) / static_cast<double>(n);
    sum_sq += p * p;
  }
  return 1.0 - sum_sq;
}

namespace {

using int128 = __int128;

// Weighted child "purity" S = A/nl + B/nr kept as the exact fraction
// (A*nr + B*nl) / (nl*nr), where A, B are sums of squared class counts.
// Weighted child gini = 1 - S/n, so larger S means larger gain.
struct SplitScore {
  uint64_t num = 0;
  uint64_t den = 1;
};

bool Better(const SplitScore& a, const SplitScore& b) {
  return static_cast<int128>(a.num) * b.den > static_cast<int128>(b.num) * a.den;
}

struct ValueLabel {
  double value;
  uint32_t label;
};

double Threshold(double lo, double hi) {
  const double mid = std::midpoint(lo, hi);
  return mid < hi ? mid : lo;
}

struct GiniSearch {
  const ColumnarData& data;
  std::vector<ValueLabel> buffer;
  std::vector<uint64_t> left;
  std::vector<uint64_t> right;

  explicit GiniSearch(const ColumnarData& d)
      : data(d), left(d.n_classes()), right(d.n_classes()) {}

  std::optional<GiniSplit> Run(std::span<const std::size_t> rows,
                               std::span<const std::size_t> features) {
    const std::size_t n = rows.size();
    if (n < 2) return std::nullopt;
    std::fill(right.begin(), right.end(), 0);
    for (const auto r : rows) ++right[data.label(r)];
    uint64_t parent_sq = 0;
    for (const auto c : right) parent_sq += c * c;
    const std::vector<uint64_t> totals = right;

    // Parent score P/n expressed with the same fraction shape.
    const SplitScore parent{parent_sq, n};
    SplitScore best = parent;
    std::optional<GiniSplit> result;

    buffer.resize(n);
    for (const auto f : features) {
      const auto column = data.column(f);
      for (std::size_t i = 0; i < n; ++i) buffer[i] = {column[rows[i]], data.label(rows[i])};
      std::sort(buffer.begin(), buffer.end(),
                [](const ValueLabel& a, const ValueLabel& b) { return a.value < b.value; });
      if (!(buffer.front().value < buffer.back().value)) continue;

      std::fill(left.begin(), left.end(), 0);
      std::copy(totals.begin(), totals.end(), right.begin());
      uint64_t a = 0;
      uint64_t b = parent_sq;
      for (std::size_t i = 0; i + 1 < n; ++i) {
        const uint32_t y = buffer[i].label;
        a += 2 * left[y] + 1;
        ++left[y];
        b -= 2 * right[y] - 1;
        --right[y];
        if (!(buffer[i].value < buffer[i + 1].value)) continue;
        const uint64_t nl = i + 1;
        const uint64_t nr = n - nl;
        const SplitScore score{a * nr + b * nl, nl * nr};
        if (Better(score, best)) {
          best = score;
          result = GiniSplit{f, Threshold(buffer[i].value, buffer[i + 1].value), 0.0};
        }
      }
    }
    if (!result) return std::nullopt;
    // gain = S/n - P/n^2
    const double dn = static_cast<double>(n);
    result->gain = (static_cast<double>(best.num) / static_cast<double>(best.den)) / dn -
                   static_cast<double>(parent_sq) / (dn * dn);
    return result;
  }
};

}  // namespace

std::optional<GiniSplit> BestGiniSplit(const ColumnarData& data,
                                       std::span<const std::size_t> rows,
                                       std::span<const std::size_t> candidate_features) {
  if (candidate_features.empty()) {
    throw InvalidArgumentError("BestGiniSplit: empty candidate feature set");
  }
  std::vector<std::size_t> features(candidate_features.begin(), candidate_features.end());
  std::sort(features.begin(), features.end());
  GiniSearch search(data);
  return search.Run(rows, features);
}

namespace {

std::optional<RandomSplit> RandomSplitWithOrder(const ColumnarData& data,
                                                std::span<const std::size_t> rows,
                                                std::vector<std::size_t>& order,
                                                Rng& rng) {
  if (rows.size() < 2) return std::nullopt;
  const std::size_t d = order.size();
  // Lazy Fisher-Yates: the first non-constant feature of a uniform random
  // permutation is uniform among the non-constant features.
  for (std::size_t i = 0; i < d; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.UniformInt(d - i));
    std::swap(order[i], order[j]);
    const auto column = data.column(order[i]);
    double lo = column[rows[0]];
    double hi = lo;
    for (const auto r : rows) {
      lo = std::min(lo, column[r]);
      hi = std::max(hi, column[r]);
    }
    if (!(lo < hi)) continue;
    double t = lo + rng.UniformOpen() * (hi - lo);
    if (!(t >= lo && t < hi)) t = Threshold(lo, hi);
    return RandomSplit{order[i], t};
  }
  return std::nullopt;
}

}  // namespace

std::optional<RandomSplit> ChooseRandomSplit(const ColumnarData& data,
                                             std::span<const std::size_t> rows,
                                             Rng& rng) {
  std::vector<std::size_t> order(data.n_features());
  std::iota(order.begin(), order.end(), 0);
  return RandomSplitWithOrder(data, rows, order, rng);
}

std::optional<RandomSplit> ChooseRandomSplit(const ColumnarData& data,
                                             std::span<const std::size_t> rows,
                                             uint64_t seed) {
  Rng rng(seed);
  return ChooseRandomSplit(data, rows, rng);
}

Tree Tree::Grow(const ColumnarData& data, std::span<const std::size_t> rows,
                const TreeConfig& config) {
  if (rows.empty()) throw InvalidArgumentError("Tree::Grow: empty row set");
  const std::size_t n_classes = data.n_classes();
  const std::size_t d = data.n_features();
  Rng rng(config.seed);
  TreeBuilder builder(n_classes, d);
  GiniSearch gini(data);

  std::vector<std::size_t> work(rows.begin(), rows.end());
  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), 0);
  const std::size_t batch = config.max_features.Resolve(d);
  std::vector<std::size_t> candidates;
  std::vector<uint32_t> counts(n_classes);

  struct Task {
    std::size_t begin;
    std::size_t end;
    uint32_t depth;
  };
  std::vector<Task> stack{{0, work.size(), 0}};
  while (!stack.empty()) {
    const Task task = stack.back();
    stack.pop_back();
    const std::span<std::size_t> node_rows(work.data() + task.begin, task.end - task.begin);

    std::fill(counts.begin(), counts.end(), 0);
    for (const auto r : node_rows) ++counts[data.label(r)];
    const auto non_zero = std::count_if(counts.begin(), counts.end(),
                                        [](uint32_t c) { return c > 0; });
    const bool capped = config.depth_cap && task.depth >= *config.depth_cap;
    if (non_zero <= 1 || capped || node_rows.size() < 2) {
      builder.AddLeaf(counts);
      continue;
    }

    std::optional<std::size_t> feature;
    double threshold = 0.0;
    if (config.kind == TreeKind::kCompletelyRandom) {
      if (auto split = RandomSplitWithOrder(data, node_rows, order, rng)) {
        feature = split->feature;
        threshold = split->threshold;
      }
    } else {
      // Fresh candidate subset per node. When a batch has no positive-gain
      // split, further batches are drawn from the unused features.
      for (std::size_t drawn = 0; drawn < d && !feature;) {
        const std::size_t take = std::min(batch, d - drawn);
        for (std::size_t i = drawn; i < drawn + take; ++i) {
          const std::size_t j = i + static_cast<std::size_t>(rng.UniformInt(d - i));
          std::swap(order[i], order[j]);
        }
        candidates.assign(order.begin() + static_cast<std::ptrdiff_t>(drawn),
                          order.begin() + static_cast<std::ptrdiff_t>(drawn + take));
        std::sort(candidates.begin(), candidates.end());
        drawn += take;
        if (auto split = gini.Run(node_rows, candidates)) {
          feature = split->feature;
          threshold = split->threshold;
        }
      }
    }
    if (!feature) {
      builder.AddLeaf(counts);
      continue;
    }

    const auto column = data.column(*feature);
    const auto mid = std::partition(node_rows.begin(), node_rows.end(),
                                    [&](std::size_t r) { return column[r] <= threshold; });
    const std::size_t split_at = task.begin + static_cast<std::size_t>(mid - node_rows.begin());
    builder.AddInternal(static_cast<uint32_t>(*feature), threshold);
    stack.push_back({split_at, task.end, task.depth + 1});
    stack.push_back({task.begin, split_at, task.depth + 1});
  }
  return builder.Finish();
}

Tree Tree::Grow(const Dataset& ds, std::span<const std::size_t> rows,
                const TreeConfig& config) {
  return Grow(ColumnarData(ds), rows, config);
}

std::size_t Tree::Depth() const {
  std::size_t max_depth = 0;
  std::vector<std::pair<uint32_t, std::size_t>> stack{{0, 0}};
  while (!stack.empty()) {
    const auto [i, depth] = stack.back();
    stack.pop_back();
    max_depth = std::max(max_depth, depth);
    const Node& node = nodes_[i];
    if (!node.is_leaf()) {
      stack.emplace_back(i + 1, depth + 1);
      stack.emplace_back(node.link, depth + 1);
    }
  }
  return max_depth;
}

uint32_t Tree::FindLeaf(std::span<const double> x) const {
  const Node* node = nodes_.data();
  uint32_t i = 0;
  while (!node[i].is_leaf()) {
    i = x[static_cast<std::size_t>(node[i].feature)] <= node[i].threshold ? i + 1
                                                                           : node[i].link;
  }
  return node[i].link;
}

void Tree::AccumulateDistribution(std::span<const double> x, std::span<double> out) const {
  const auto entries = leaf_entries(FindLeaf(x));
  uint64_t total = 0;
  for (const auto& e : entries) total += e.count;
  const double denom = static_cast<double>(total);
  for (const auto& e : entries) out[e.label] += static_cast<double>(e.count) / denom;
}

ClassVector Tree::LeafDistribution(std::span<const double> x) const {
  if (x.size() != n_features_) {
    throw DimensionMismatchError("Tree: input has " + std::to_string(x.size()) +
                                 " features, tree expects " + std::to_string(n_features_));
  }
  ClassVector out(n_classes_, 0.0);
  AccumulateDistribution(x, out);
  return out;
}

bool Tree::operator==(const Tree& other) const {
  if (n_classes_ != other.n_classes_ || n_features_ != other.n_features_ ||
      nodes_.size() != other.nodes_.size() || leaf_offsets_ != other.leaf_offsets_ ||
      entries_ != other.entries_) {
    return false;
  }
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node& a = nodes_[i];
    const Node& b = other.nodes_[i];
    if (a.feature != b.feature || a.link != b.link) return false;
    if (!a.is_leaf() && a.threshold != b.threshold) return false;
  }
  return true;
}

TreeBuilder::TreeBuilder(std::size_t n_classes, std::size_t n_features) {
  if (n_classes == 0) throw InvalidArgumentError("TreeBuilder: n_classes must be positive");
  tree_.n_classes_ = n_classes;
  tree_.n_features_ = n_features;
  tree_.leaf_offsets_.push_back(0);
}

void TreeBuilder::PlaceNode() {
  if (started_ && open_.empty()) throw FormatError("TreeBuilder: node after a complete tree");
  started_ = true;
  const auto index = static_cast<uint32_t>(tree_.nodes_.size());
  if (!open_.empty() && open_.back().left_done) {
    tree_.nodes_[open_.back().index].link = index;
  }
}

void TreeBuilder::CloseSubtree() {
  while (!open_.empty()) {
    if (!open_.back().left_done) {
      open_.back().left_done = true;
      return;
    }
    open_.pop_back();
  }
}

void TreeBuilder::AddInternal(uint32_t feature, double threshold) {
  if (feature >= tree_.n_features_) {
    throw FormatError("TreeBuilder: split feature " + std::to_string(feature) +
                      " out of range");
  }
  PlaceNode();
  // A right child that is itself internal stays open until its subtrees close.
  if (!open_.empty() && open_.back().left_done) open_.pop_back();
  const auto index = static_cast<uint32_t>(tree_.nodes_.size());
  tree_.nodes_.push_back({static_cast<int32_t>(feature), 0, threshold});
  open_.push_back({index, false});
}

void TreeBuilder::AddLeafEntries(std::span<const Tree::LeafEntry> entries) {
  if (entries.empty()) throw FormatError("TreeBuilder: leaf without instances");
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].label >= tree_.n_classes_ || entries[i].count == 0 ||
        (i > 0 && entries[i].label <= entries[i - 1].label)) {
      throw FormatError("TreeBuilder: malformed leaf entries");
    }
  }
  PlaceNode();
  if (!open_.empty() && open_.back().left_done) {
    open_.pop_back();
  }
  const auto leaf = static_cast<uint32_t>(tree_.leaf_offsets_.size() - 1);
  tree_.nodes_.push_back({-1, leaf, 0.0});
  tree_.entries_.insert(tree_.entries_.end(), entries.begin(), entries.end());
  tree_.leaf_offsets_.push_back(static_cast<uint32_t>(tree_.entries_.size()));
  CloseSubtree();
}

void TreeBuilder::AddLeaf(std::span<const uint32_t> class_counts) {
  if (class_counts.size() != tree_.n_classes_) {
    throw InvalidArgumentError("TreeBuilder: leaf counts have the wrong length");
  }
  std::vector<Tree::LeafEntry> entries;
  for (uint32_t c = 0; c < class_counts.size(); ++c) {
    if (class_counts[c] > 0) entries.push_back({c, class_counts[c]});
  }
  AddLeafEntries(entries);
}

Tree TreeBuilder::Finish() {
  if (!complete()) throw FormatError("TreeBuilder: tree is incomplete");
  Tree out = std::move(tree_);
  tree_ = Tree{};
  open_.clear();
  started_ = false;
  return out;
}

}  // namespace deepforest
