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

#include "deepforest/cascade.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "deepforest/error.h"
#include "deepforest/metrics.h"
#include "deepforest/rng.h"
#include "deepforest/synthetic.h"

namespace deepforest {
namespace {

Dataset NoisyData(std::size_t n, std::size_t d, std::size_t k, uint64_t seed, double signal) {
  Rng rng(seed);
  FeatureMatrix x(n, d);
  std::vector<uint32_t> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = static_cast<uint32_t>(i % k);
    for (std::size_t j = 0; j < d; ++j) {
      x.at(i, j) = rng.UniformOpen() + (j < 2 ? signal * y[i] : 0.0);
    }
  }
  return Dataset(std::move(x), std::move(y), k);
}

LevelConfig SmallLevel(std::size_t n_trees = 6, std::size_t n_crt = 2, std::size_t n_rf = 2) {
  return LevelConfig::Default(n_trees, n_crt, n_rf);
}

std::vector<FeatureMatrix> Sources(const Dataset& ds) { return {ds.features()}; }

TEST(LevelConfigTest, Defaults) {
  const LevelConfig c = LevelConfig::Default();
  ASSERT_EQ(c.forests.size(), 8u);
  for (std::size_t i = 0; i < 8; ++i) {
    EXPECT_EQ(c.forests[i].tree.kind, i < 4 ? TreeKind::kCompletelyRandom : TreeKind::kGiniSplit);
    EXPECT_EQ(c.forests[i].n_trees, 500u);
    EXPECT_FALSE(c.forests[i].tree.depth_cap.has_value());
  }
  EXPECT_EQ(c.k_folds, 3u);
  EXPECT_EQ(c.cv_mode, CvMode::kOutOfFold);
  const TerminationConfig t;
  EXPECT_EQ(t.tolerance, 1e-6);
  EXPECT_EQ(t.patience, 1u);
  EXPECT_EQ(t.max_levels, 20u);
  EXPECT_EQ(t.growing_fraction, 0.8);
}

TEST(TrainLevelTest, AugmentationWidths) {
  const Dataset three = NoisyData(60, 4, 3, 1, 0.5);
  const FeatureMatrix none(60, 0);
  const LevelResult r = TrainLevel(three.features(), none, three.labels(), 3, SmallLevel(), 1);
  EXPECT_EQ(r.augmentation.cols(), 12u);
  EXPECT_EQ(r.level.output_dim(), 12u);
  EXPECT_EQ(r.level.input_dim(), 4u);
  for (std::size_t i = 0; i < 60; ++i) {
    for (std::size_t f = 0; f < 4; ++f) {
      double sum = 0;
      for (std::size_t c = 0; c < 3; ++c) sum += r.augmentation.at(i, f * 3 + c);
      EXPECT_NEAR(sum, 1.0, 1e-9);
    }
  }
  // Next level input = base ++ augmentation.
  const LevelResult next =
      TrainLevel(three.features(), r.augmentation, three.labels(), 3, SmallLevel(), 2);
  EXPECT_EQ(next.level.input_dim(), 4u + 12u);

  const Dataset two = NoisyData(40, 3, 2, 2, 0.5);
  LevelConfig one;
  one.forests = {ForestConfig::RandomForest(4)};
  EXPECT_EQ(TrainLevel(two.features(), FeatureMatrix(40, 0), two.labels(), 2, one, 1)
                .augmentation.cols(),
            2u);
}

TEST(GrowCascadeTest, MaxLevelsCap) {
  const Dataset ds = NoisyData(120, 4, 3, 3, 0.3);
  TerminationConfig t;
  t.max_levels = 1;
  const CascadeModel m = GrowCascade(Sources(ds), ds.labels(), 3, SmallLevel(), t, 1);
  EXPECT_EQ(m.levels.size(), 1u);
  EXPECT_EQ(m.termination.grown_levels(), 1u);
}

TEST(GrowCascadeTest, SaturatedDataStopsEarly) {
  const Dataset ds = SeparableData(200, 5, 4);
  const CascadeModel m = GrowCascade(Sources(ds), ds.labels(), 2, SmallLevel(), {}, 2);
  ASSERT_GE(m.termination.grown_levels(), 1u);
  EXPECT_EQ(m.termination.level_accuracy[0], 1.0);
  EXPECT_EQ(m.termination.grown_levels(), 2u);
  EXPECT_EQ(m.levels.size(), 1u);
}

TEST(GrowCascadeTest, TerminationInvariants) {
  for (uint64_t seed = 0; seed < 4; ++seed) {
    const Dataset ds = NoisyData(150, 5, 3, 10 + seed, 0.25);
    TerminationConfig t;
    t.patience = 1 + seed % 2;
    t.max_levels = 4;
    const CascadeModel m = GrowCascade(Sources(ds), ds.labels(), 3, SmallLevel(), t, seed);
    const auto& acc = m.termination.level_accuracy;
    const std::size_t chosen = m.termination.chosen_levels;
    ASSERT_GE(chosen, 1u);
    EXPECT_LE(chosen, m.termination.grown_levels());
    EXPECT_LE(m.termination.grown_levels(), t.max_levels);
    EXPECT_EQ(acc[chosen - 1], *std::max_element(acc.begin(), acc.end()));
    // First level attaining the maximum.
    EXPECT_EQ(chosen - 1, static_cast<std::size_t>(
                              std::max_element(acc.begin(), acc.end()) - acc.begin()));
    EXPECT_EQ(m.levels.size(), chosen);
    // Growth stopped because of patience or the cap.
    const std::size_t after = m.termination.grown_levels() - chosen;
    EXPECT_TRUE(after == t.patience || m.termination.grown_levels() == t.max_levels);
  }
}

TEST(GrowCascadeTest, WidthChainAndArchitecture) {
  const Dataset ds = NoisyData(150, 5, 3, 4, 0.25);
  TerminationConfig t;
  t.tolerance = -1.0;  // every level counts as an improvement
  t.max_levels = 3;
  const LevelConfig level = SmallLevel();
  const CascadeModel m = GrowCascade(Sources(ds), ds.labels(), 3, level, t, 3);
  ASSERT_EQ(m.levels.size(), 3u);
  for (std::size_t l = 0; l < 3; ++l) {
    EXPECT_EQ(m.levels[l].forests().size(), level.forests.size());
    EXPECT_EQ(m.levels[l].input_dim(), 5u + (l == 0 ? 0 : level.forests.size() * 3));
    for (std::size_t f = 0; f < level.forests.size(); ++f) {
      EXPECT_EQ(m.levels[l].forests()[f].trees().size(), level.forests[f].n_trees);
      EXPECT_EQ(m.levels[l].forests()[f].config().tree.kind, level.forests[f].tree.kind);
    }
  }
}

TEST(GrowCascadeTest, Deterministic) {
  const Dataset ds = NoisyData(120, 4, 3, 5, 0.3);
  const CascadeModel a = GrowCascade(Sources(ds), ds.labels(), 3, SmallLevel(), {}, 9);
  const CascadeModel b = GrowCascade(Sources(ds), ds.labels(), 3, SmallLevel(), {}, 9);
  EXPECT_TRUE(a == b);
}

TEST(GrowCascadeTest, TrainingAccuracyCriterion) {
  const Dataset ds = NoisyData(120, 4, 3, 6, 0.3);
  TerminationConfig t;
  t.criterion = TerminationCriterion::kTrainingAccuracy;
  t.max_levels = 4;
  const CascadeModel m = GrowCascade(Sources(ds), ds.labels(), 3, SmallLevel(), t, 1);
  EXPECT_EQ(m.termination.criterion, TerminationCriterion::kTrainingAccuracy);
  EXPECT_EQ(m.levels.size(), m.termination.chosen_levels);
  const auto& acc = m.termination.level_accuracy;
  EXPECT_EQ(acc[m.termination.chosen_levels - 1], *std::max_element(acc.begin(), acc.end()));
}

TEST(GrowCascadeTest, CyclesThroughSources) {
  const Dataset ds = NoisyData(90, 4, 3, 7, 0.4);
  FeatureMatrix narrow(90, 2);
  for (std::size_t i = 0; i < 90; ++i) {
    narrow.at(i, 0) = ds.row(i)[0];
    narrow.at(i, 1) = ds.row(i)[1];
  }
  const std::vector<FeatureMatrix> sources = {ds.features(), narrow};
  TerminationConfig t;
  t.tolerance = -1.0;
  t.max_levels = 3;
  const CascadeModel m = GrowCascade(sources, ds.labels(), 3, SmallLevel(4, 1, 1), t, 1);
  ASSERT_EQ(m.levels.size(), 3u);
  EXPECT_EQ(m.levels[0].input_dim(), 4u);
  EXPECT_EQ(m.levels[1].input_dim(), 2u + 6u);
  EXPECT_EQ(m.levels[2].input_dim(), 4u + 6u);
  EXPECT_EQ(PredictCascade(m, sources).labels.size(), 90u);
  const std::vector<FeatureMatrix> wrong = {ds.features()};
  EXPECT_THROW(PredictCascade(m, wrong), DimensionMismatchError);
}

TEST(CascadeClassVectorsTest, OneLevelEqualsForestOutputs) {
  const Dataset ds = NoisyData(90, 4, 3, 8, 0.4);
  TerminationConfig t;
  t.max_levels = 1;
  const CascadeModel m = GrowCascade(Sources(ds), ds.labels(), 3, SmallLevel(), t, 1);
  const auto vectors = CascadeClassVectors(m, Sources(ds));
  ASSERT_EQ(vectors.size(), 4u);
  for (std::size_t f = 0; f < 4; ++f) {
    EXPECT_EQ(vectors[f].cols(), 3u);
    EXPECT_EQ(vectors[f].values(), m.levels[0].forests()[f].ClassVectors(ds.features()).values());
    for (std::size_t i = 0; i < ds.n_rows(); ++i) {
      const auto v = vectors[f].row(i);
      EXPECT_NEAR(std::accumulate(v.begin(), v.end(), 0.0), 1.0, 1e-9);
    }
  }
}

TEST(AggregateTest, MeanAndTieRule) {
  const std::vector<FeatureMatrix> vs = {FeatureMatrix(1, 2, {0.6, 0.4}),
                                         FeatureMatrix(1, 2, {0.5, 0.5})};
  const Prediction p = Aggregate(vs);
  EXPECT_NEAR(p.aggregated.at(0, 0), 0.55, 1e-15);
  EXPECT_NEAR(p.aggregated.at(0, 1), 0.45, 1e-15);
  EXPECT_EQ(p.labels[0], 0u);

  const std::vector<FeatureMatrix> tie = {FeatureMatrix(1, 2, {0.5, 0.5})};
  EXPECT_EQ(Aggregate(tie).labels[0], 0u);
}

TEST(AggregateTest, ArgmaxInvariantUnderScaling) {
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<FeatureMatrix> vs;
    std::vector<FeatureMatrix> scaled;
    // Powers of two scale exactly, so ties stay ties.
    const double s = std::ldexp(1.0, static_cast<int>(rng.UniformInt(7)) - 3);
    for (int f = 0; f < 3; ++f) {
      FeatureMatrix m(4, 3);
      for (auto& v : m.row(0)) v = static_cast<double>(rng.UniformInt(4));
      for (std::size_t i = 1; i < 4; ++i) {
        for (auto& v : m.row(i)) v = rng.UniformOpen();
      }
      FeatureMatrix ms = m;
      for (std::size_t i = 0; i < 4; ++i) {
        for (auto& v : ms.row(i)) v *= s;
      }
      vs.push_back(std::move(m));
      scaled.push_back(std::move(ms));
    }
    EXPECT_EQ(Aggregate(vs).labels, Aggregate(scaled).labels);
  }
}

// Stochastic guard: on the growing set, the full cascade fits the training
// rows at least as well as its first level alone in >= 90% of seeded trials.
// Level 1 (fully grown trees) memorizes its training rows, so the guard holds
// only if deeper levels keep that fit in-sample.
int TrainingFitTrials(CvMode mode, int trials) {
  int ok = 0;
  for (int trial = 0; trial < trials; ++trial) {
    const Dataset ds = NoisyData(150, 6, 3, 100 + trial, 0.5);
    const SplitPair split = StratifiedSplit(ds, 0.8, trial);
    const std::vector<FeatureMatrix> sources = Sources(split.growing);
    LevelConfig level = SmallLevel();
    level.cv_mode = mode;
    TerminationConfig t;
    t.max_levels = 4;
    const CascadeModel m =
        GrowCascade(sources, split.growing.labels(), 3, level, t, static_cast<uint64_t>(trial));
    CascadeModel first = m;
    first.levels.resize(1);
    const auto labels = split.growing.labels();
    ok += Accuracy(PredictCascade(m, sources).labels, labels) >=
          Accuracy(PredictCascade(first, sources).labels, labels);
  }
  return ok;
}

TEST(GrowCascadeTest, DeeperCascadeKeepsTrainingFit) {
  EXPECT_GE(TrainingFitTrials(CvMode::kOutOfFold, 20), 18);
}

TEST(GrowCascadeTest, DeeperCascadeKeepsTrainingFitInFoldAverage) {
  EXPECT_GE(TrainingFitTrials(CvMode::kInFoldAverage, 20), 18);
}

}  // namespace
}  // namespace deepforest
