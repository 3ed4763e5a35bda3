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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <vector>

#include "deepforest/error.h"
#include "deepforest/rng.h"

namespace deepforest {
namespace {

std::vector<std::size_t> AllRows(std::size_t n) {
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), 0);
  return rows;
}

Dataset MakeDataset(std::size_t cols, std::vector<double> values, std::vector<uint32_t> labels,
                    std::size_t n_classes) {
  const std::size_t rows = labels.size();
  return Dataset(FeatureMatrix(rows, cols, std::move(values)), std::move(labels), n_classes);
}

// Random dataset with small integer values so ties and duplicates occur.
Dataset RandomSmallDataset(Rng& rng, std::size_t n, std::size_t d, std::size_t n_classes,
                           uint64_t value_range) {
  std::vector<double> values(n * d);
  for (auto& v : values) v = static_cast<double>(rng.UniformInt(value_range));
  std::vector<uint32_t> labels(n);
  for (auto& y : labels) y = static_cast<uint32_t>(rng.UniformInt(n_classes));
  return MakeDataset(d, std::move(values), std::move(labels), n_classes);
}

// Weighted child impurity decrease computed from scratch in long double.
long double OracleGain(const Dataset& ds, std::size_t feature, double threshold) {
  const std::size_t k = ds.n_classes();
  std::vector<long double> left(k, 0), right(k, 0), all(k, 0);
  for (std::size_t i = 0; i < ds.n_rows(); ++i) {
    (ds.row(i)[feature] <= threshold ? left : right)[ds.label(i)] += 1;
    all[ds.label(i)] += 1;
  }
  auto impurity = [](const std::vector<long double>& c, long double& n) {
    n = std::accumulate(c.begin(), c.end(), 0.0L);
    long double s = 0;
    for (const auto x : c) s += (x / n) * (x / n);
    return 1 - s;
  };
  long double nl, nr, n;
  const long double gl = impurity(left, nl);
  const long double gr = impurity(right, nr);
  const long double g = impurity(all, n);
  return g - (nl / n) * gl - (nr / n) * gr;
}

struct OracleSplit {
  bool found = false;
  std::size_t feature = 0;
  double threshold = 0;
  long double gain = 0;
};

// Enumerates every (feature, midpoint) pair in ascending order and keeps the
// first strictly best one.
OracleSplit BruteForceSplit(const Dataset& ds) {
  OracleSplit best;
  for (std::size_t f = 0; f < ds.n_features(); ++f) {
    std::set<double> distinct;
    for (std::size_t i = 0; i < ds.n_rows(); ++i) distinct.insert(ds.row(i)[f]);
    std::vector<double> v(distinct.begin(), distinct.end());
    for (std::size_t j = 0; j + 1 < v.size(); ++j) {
      const double t = (v[j] + v[j + 1]) / 2;
      const long double gain = OracleGain(ds, f, t);
      if (gain > 1e-15L && (!best.found || gain > best.gain + 1e-15L)) {
        best = {true, f, t, gain};
      }
    }
  }
  return best;
}

TEST(GiniTest, MatchesDefinition) {
  const std::vector<uint32_t> pure = {4, 0};
  const std::vector<uint32_t> even = {2, 2};
  const std::vector<uint32_t> skew = {3, 1};
  EXPECT_DOUBLE_EQ(Gini(pure), 0.0);
  EXPECT_DOUBLE_EQ(Gini(even), 0.5);
  // 1 - (9 + 1) / 16
  EXPECT_NEAR(Gini(skew), 6.0 / 16.0, 1e-15);
}

TEST(GiniTest, RejectsEmptyCounts) {
  const std::vector<uint32_t> zeros = {0, 0, 0};
  EXPECT_THROW(Gini(zeros), InvalidArgumentError);
}

TEST(BestGiniSplitTest, FourPointsTwoClasses) {
  const Dataset ds = MakeDataset(1, {1, 2, 3, 4}, {0, 0, 1, 1}, 2);
  const ColumnarData data(ds);
  const auto rows = AllRows(4);
  const std::vector<std::size_t> features = {0};
  const auto split = BestGiniSplit(data, rows, features);
  ASSERT_TRUE(split.has_value());
  const OracleSplit oracle = BruteForceSplit(ds);
  EXPECT_EQ(split->feature, 0u);
  EXPECT_DOUBLE_EQ(split->threshold, oracle.threshold);
  EXPECT_DOUBLE_EQ(split->threshold, 2.5);
  EXPECT_NEAR(split->gain, static_cast<double>(oracle.gain), 1e-12);
  EXPECT_NEAR(split->gain, 0.5, 1e-12);
}

TEST(BestGiniSplitTest, ConstantFeatureHasNoSplit) {
  const Dataset ds = MakeDataset(1, {7, 7, 7, 7}, {0, 1, 0, 1}, 2);
  const ColumnarData data(ds);
  const std::vector<std::size_t> features = {0};
  EXPECT_FALSE(BestGiniSplit(data, AllRows(4), features).has_value());
}

TEST(BestGiniSplitTest, PureNodeHasNoSplit) {
  const Dataset ds = MakeDataset(1, {1, 2, 3, 4}, {1, 1, 1, 1}, 2);
  const ColumnarData data(ds);
  const std::vector<std::size_t> features = {0};
  EXPECT_FALSE(BestGiniSplit(data, AllRows(4), features).has_value());
}

TEST(BestGiniSplitTest, EmptyCandidateSetThrows) {
  const Dataset ds = MakeDataset(1, {1, 2}, {0, 1}, 2);
  const ColumnarData data(ds);
  EXPECT_THROW(BestGiniSplit(data, AllRows(2), {}), InvalidArgumentError);
}

TEST(BestGiniSplitTest, AgreesWithBruteForceOnSmallDatasets) {
  Rng rng(20240611);
  int with_split = 0;
  for (int trial = 0; trial < 3000; ++trial) {
    const std::size_t n = 2 + rng.UniformInt(7);
    const std::size_t d = 1 + rng.UniformInt(4);
    const std::size_t k = 2 + rng.UniformInt(2);
    const Dataset ds = RandomSmallDataset(rng, n, d, k, 1 + rng.UniformInt(5));
    const ColumnarData data(ds);
    const auto rows = AllRows(n);
    const auto features = AllRows(d);
    const auto got = BestGiniSplit(data, rows, features);
    const OracleSplit want = BruteForceSplit(ds);
    ASSERT_EQ(got.has_value(), want.found) << "trial " << trial;
    if (!want.found) continue;
    ++with_split;
    EXPECT_EQ(got->feature, want.feature) << "trial " << trial;
    EXPECT_DOUBLE_EQ(got->threshold, want.threshold) << "trial " << trial;
    EXPECT_NEAR(got->gain, static_cast<double>(want.gain), 1e-12) << "trial " << trial;
  }
  EXPECT_GT(with_split, 1000);
}

TEST(BestGiniSplitTest, UsesOnlyCandidateFeatures) {
  // Feature 0 separates perfectly but is not a candidate.
  const Dataset ds = MakeDataset(2, {0, 5, 0, 1, 1, 4, 1, 2}, {0, 1, 1, 0}, 2);
  const ColumnarData data(ds);
  const std::vector<std::size_t> features = {1};
  const auto split = BestGiniSplit(data, AllRows(4), features);
  ASSERT_TRUE(split.has_value());
  EXPECT_EQ(split->feature, 1u);
}

TEST(RandomSplitTest, ForcedFeature) {
  // Feature 1 is the only non-constant one.
  const Dataset ds = MakeDataset(3, {2, 0, 5, 2, 1, 5, 2, 1, 5}, {0, 1, 1}, 2);
  const ColumnarData data(ds);
  for (uint64_t seed = 0; seed < 50; ++seed) {
    const auto split = ChooseRandomSplit(data, AllRows(3), seed);
    ASSERT_TRUE(split.has_value());
    EXPECT_EQ(split->feature, 1u);
    EXPECT_GT(split->threshold, 0.0);
    EXPECT_LT(split->threshold, 1.0);
  }
}

TEST(RandomSplitTest, AllConstantGivesNothing) {
  const Dataset ds = MakeDataset(2, {1, 1, 1, 1, 1, 1}, {0, 1, 0}, 2);
  const ColumnarData data(ds);
  EXPECT_FALSE(ChooseRandomSplit(data, AllRows(3), 7).has_value());
}

TEST(RandomSplitTest, DeterministicForSeed) {
  Rng rng(3);
  const Dataset ds = RandomSmallDataset(rng, 20, 5, 2, 100);
  const ColumnarData data(ds);
  const auto a = ChooseRandomSplit(data, AllRows(20), 99);
  const auto b = ChooseRandomSplit(data, AllRows(20), 99);
  ASSERT_TRUE(a && b);
  EXPECT_EQ(a->feature, b->feature);
  EXPECT_EQ(a->threshold, b->threshold);
}

TEST(RandomSplitTest, BothSidesNonEmptyAndFeatureUniform) {
  // Features 0, 2, 4 vary; 1 and 3 are constant.
  const std::size_t n = 6;
  std::vector<double> values;
  Rng data_rng(11);
  for (std::size_t i = 0; i < n; ++i) {
    values.push_back(static_cast<double>(data_rng.UniformInt(3)));
    values.push_back(1.0);
    values.push_back(static_cast<double>(i));
    values.push_back(-2.0);
    values.push_back(i % 2 == 0 ? 0.5 : 0.25);
  }
  values[0] = 0;
  values[5] = 2;
  const Dataset ds = MakeDataset(5, values, {0, 1, 0, 1, 0, 1}, 2);
  const ColumnarData data(ds);
  const auto rows = AllRows(n);
  std::map<std::size_t, int> picks;
  Rng rng(5);
  const int draws = 6000;
  for (int i = 0; i < draws; ++i) {
    const auto split = ChooseRandomSplit(data, rows, rng);
    ASSERT_TRUE(split.has_value());
    ++picks[split->feature];
    std::size_t left = 0;
    for (const auto r : rows) left += data.value(split->feature, r) <= split->threshold;
    EXPECT_GT(left, 0u);
    EXPECT_LT(left, n);
  }
  EXPECT_EQ(picks.size(), 3u);
  for (const std::size_t f : {0u, 2u, 4u}) {
    // Expected 2000 each; 5 sigma is about 183.
    EXPECT_NEAR(picks[f], draws / 3, 200) << "feature " << f;
  }
}

TEST(TreeTest, SingleInstanceIsOneLeaf) {
  const Dataset ds = MakeDataset(2, {1, 2}, {1}, 3);
  const Tree t = Tree::Grow(ds, AllRows(1), TreeConfig{});
  ASSERT_EQ(t.nodes().size(), 1u);
  EXPECT_TRUE(t.nodes()[0].is_leaf());
  const auto entries = t.leaf_entries(0);
  ASSERT_EQ(entries.size(), 1u);
  EXPECT_EQ(entries[0].label, 1u);
  EXPECT_EQ(entries[0].count, 1u);
}

TEST(TreeTest, DepthCapOne) {
  const Dataset ds = MakeDataset(1, {1, 2, 3, 4}, {0, 1, 0, 1}, 2);
  TreeConfig cfg;
  cfg.kind = TreeKind::kCompletelyRandom;
  cfg.depth_cap = 1;
  const Tree t = Tree::Grow(ds, AllRows(4), cfg);
  EXPECT_EQ(t.nodes().size(), 3u);
  EXPECT_EQ(t.n_leaves(), 2u);
  EXPECT_EQ(t.Depth(), 1u);
}

// Pure leaves for completely-random trees without a cap, on data with no
// feature vector shared across classes.
TEST(TreeTest, CompletelyRandomLeavesArePure) {
  Rng rng(42);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 50 + rng.UniformInt(100);
    const Dataset ds = RandomSmallDataset(rng, n, 4, 3, 1000000);
    TreeConfig cfg;
    cfg.kind = TreeKind::kCompletelyRandom;
    cfg.seed = static_cast<uint64_t>(trial);
    const Tree t = Tree::Grow(ds, AllRows(n), cfg);
    for (uint32_t leaf = 0; leaf < t.n_leaves(); ++leaf) {
      EXPECT_EQ(t.leaf_entries(leaf).size(), 1u) << "trial " << trial;
    }
  }
}

TEST(TreeTest, GiniSplitsReduceImpurity) {
  Rng rng(8);
  const Dataset ds = RandomSmallDataset(rng, 200, 6, 3, 20);
  TreeConfig cfg;
  cfg.seed = 4;
  const Tree t = Tree::Grow(ds, AllRows(200), cfg);
  // Route every row and check each internal node's split on its rows.
  std::vector<std::vector<std::size_t>> at(t.nodes().size());
  at[0] = AllRows(200);
  for (uint32_t i = 0; i < t.nodes().size(); ++i) {
    const auto& node = t.nodes()[i];
    if (node.is_leaf()) continue;
    std::vector<uint32_t> parent(3), left(3), right(3);
    for (const auto r : at[i]) {
      ++parent[ds.label(r)];
      const bool go_left = ds.row(r)[node.feature] <= node.threshold;
      (go_left ? at[i + 1] : at[node.link]).push_back(r);
      ++(go_left ? left : right)[ds.label(r)];
    }
    const double n = static_cast<double>(at[i].size());
    const double nl = static_cast<double>(at[i + 1].size());
    const double nr = static_cast<double>(at[node.link].size());
    ASSERT_GT(nl, 0);
    ASSERT_GT(nr, 0);
    EXPECT_LT(nl / n * Gini(left) + nr / n * Gini(right), Gini(parent) - 1e-12);
  }
}

TEST(TreeTest, DistributionsAreNormalized) {
  Rng rng(9);
  const Dataset ds = RandomSmallDataset(rng, 300, 5, 4, 6);
  for (const auto kind : {TreeKind::kGiniSplit, TreeKind::kCompletelyRandom}) {
    TreeConfig cfg;
    cfg.kind = kind;
    cfg.depth_cap = 4;
    const Tree t = Tree::Grow(ds, AllRows(300), cfg);
    for (int i = 0; i < 200; ++i) {
      std::vector<double> x(5);
      for (auto& v : x) v = rng.UniformOpen() * 8 - 1;
      const auto p = t.LeafDistribution(x);
      double sum = 0;
      for (const auto v : p) {
        EXPECT_GE(v, 0.0);
        sum += v;
      }
      EXPECT_NEAR(sum, 1.0, 1e-12);
    }
  }
}

TEST(TreeTest, GrowIsDeterministic) {
  Rng rng(10);
  const Dataset ds = RandomSmallDataset(rng, 150, 7, 3, 50);
  for (const auto kind : {TreeKind::kGiniSplit, TreeKind::kCompletelyRandom}) {
    TreeConfig cfg;
    cfg.kind = kind;
    cfg.seed = 77;
    EXPECT_TRUE(Tree::Grow(ds, AllRows(150), cfg) == Tree::Grow(ds, AllRows(150), cfg));
    TreeConfig other = cfg;
    other.seed = 78;
    EXPECT_FALSE(Tree::Grow(ds, AllRows(150), cfg) == Tree::Grow(ds, AllRows(150), other));
  }
}

TEST(TreeTest, GiniFallsBackToFurtherFeatures) {
  // Only feature 3 is informative; with one candidate per node the first
  // draw often misses it, but growth still separates the classes.
  std::vector<double> values;
  std::vector<uint32_t> labels;
  for (int i = 0; i < 40; ++i) {
    values.insert(values.end(), {1, 1, 1, static_cast<double>(i)});
    labels.push_back(i < 20 ? 0 : 1);
  }
  const Dataset ds = MakeDataset(4, values, labels, 2);
  for (uint64_t seed = 0; seed < 20; ++seed) {
    TreeConfig cfg;
    cfg.max_features = MaxFeatures::Explicit(1);
    cfg.seed = seed;
    const Tree t = Tree::Grow(ds, AllRows(40), cfg);
    EXPECT_EQ(t.n_leaves(), 2u);
  }
}

Tree HandBuiltStump() {
  // x0 <= 0.5 ? {0:3, 1:1} : {2:2}
  TreeBuilder b(3, 2);
  b.AddInternal(0, 0.5);
  const std::vector<uint32_t> left = {3, 1, 0};
  const std::vector<uint32_t> right = {0, 0, 2};
  b.AddLeaf(left);
  b.AddLeaf(right);
  return b.Finish();
}

TEST(TreeTest, LeafDistributionNormalizesCounts) {
  const Tree t = HandBuiltStump();
  const std::vector<double> x = {0.0, 9.0};
  const auto p = t.LeafDistribution(x);
  EXPECT_EQ(p, (ClassVector{0.75, 0.25, 0.0}));
}

TEST(TreeTest, BoundaryValueGoesLeft) {
  const Tree t = HandBuiltStump();
  const std::vector<double> on = {0.5, 0.0};
  const std::vector<double> above = {std::nextafter(0.5, 1.0), 0.0};
  EXPECT_EQ(t.LeafDistribution(on)[0], 0.75);
  EXPECT_EQ(t.LeafDistribution(above)[2], 1.0);
}

TEST(TreeTest, DepthZeroTreeIsConstant) {
  TreeBuilder b(2, 3);
  const std::vector<uint32_t> counts = {1, 3};
  b.AddLeaf(counts);
  const Tree t = b.Finish();
  EXPECT_EQ(t.Depth(), 0u);
  for (double v : {-5.0, 0.0, 12.0}) {
    const std::vector<double> x = {v, v, v};
    EXPECT_EQ(t.LeafDistribution(x), (ClassVector{0.25, 0.75}));
  }
}

TEST(TreeTest, DimensionMismatchThrows) {
  const Tree t = HandBuiltStump();
  const std::vector<double> x = {1.0};
  EXPECT_THROW(t.LeafDistribution(x), DimensionMismatchError);
}

TEST(TreeBuilderTest, PreOrderLinks) {
  // root(f0) -> left: n1(f1) -> {leaf a, leaf b}; right: leaf c
  TreeBuilder b(2, 2);
  b.AddInternal(0, 1.0);
  b.AddInternal(1, 2.0);
  const std::vector<uint32_t> a = {1, 0}, bb = {0, 1}, c = {2, 2};
  b.AddLeaf(a);
  b.AddLeaf(bb);
  EXPECT_FALSE(b.complete());
  b.AddLeaf(c);
  ASSERT_TRUE(b.complete());
  const Tree t = b.Finish();
  ASSERT_EQ(t.nodes().size(), 5u);
  EXPECT_EQ(t.nodes()[0].link, 4u);
  EXPECT_EQ(t.nodes()[1].link, 3u);
  const std::vector<double> x = {0.0, 5.0};
  EXPECT_EQ(t.LeafDistribution(x), (ClassVector{0.0, 1.0}));
  const std::vector<double> y = {3.0, 0.0};
  EXPECT_EQ(t.LeafDistribution(y), (ClassVector{0.5, 0.5}));
}

TEST(TreeBuilderTest, RejectsMalformedInput) {
  TreeBuilder b(2, 2);
  b.AddInternal(0, 1.0);
  EXPECT_THROW(b.Finish(), FormatError);
  EXPECT_THROW(b.AddInternal(5, 0.0), FormatError);
  const std::vector<Tree::LeafEntry> unsorted = {{1, 1}, {0, 1}};
  EXPECT_THROW(b.AddLeafEntries(unsorted), FormatError);

  TreeBuilder done(2, 1);
  const std::vector<uint32_t> counts = {1, 0};
  done.AddLeaf(counts);
  EXPECT_THROW(done.AddLeaf(counts), FormatError);
}

}  // namespace
}  // namespace deepforest
