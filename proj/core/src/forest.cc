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

#include "deepforest/forest.h"

#include <algorithm>
#include <string>
#include <utility>

#include "deepforest/error.h"
#include "deepforest/parallel.h"
#include "deepforest/rng.h"

namespace deepforest {
namespace {

constexpr uint64_t kBootstrapStream = 0x626f6f7473747270ULL;
constexpr uint64_t kFoldStream = 0x666f6c6473ULL;
constexpr std::size_t kRowBlock = 64;

}  // namespace

ForestConfig ForestConfig::RandomForest(std::size_t n_trees) {
  ForestConfig c;
  c.tree.kind = TreeKind::kGiniSplit;
  c.tree.max_features = MaxFeatures::Sqrt();
  c.n_trees = n_trees;
  c.bootstrap = true;
  return c;
}

ForestConfig ForestConfig::CompletelyRandom(std::size_t n_trees) {
  ForestConfig c;
  c.tree.kind = TreeKind::kCompletelyRandom;
  c.n_trees = n_trees;
  c.bootstrap = false;
  return c;
}

uint64_t TreeSeed(uint64_t forest_seed, std::size_t index) {
  return DeriveSeed(forest_seed, index);
}

Forest::Forest(ForestConfig config, std::vector<Tree> trees, std::size_t n_classes,
               std::size_t n_features)
    : config_(std::move(config)),
      trees_(std::move(trees)),
      n_classes_(n_classes),
      n_features_(n_features) {
  if (trees_.empty()) throw InvalidArgumentError("Forest: no trees");
  for (const auto& t : trees_) {
    if (t.n_classes() != n_classes_ || t.n_features() != n_features_) {
      throw InvalidArgumentError("Forest: trees disagree on classes or features");
    }
  }
}

Forest Forest::Train(const ColumnarData& data, std::span<const std::size_t> rows,
                     const ForestConfig& config) {
  if (config.n_trees == 0) throw InvalidArgumentError("Forest: n_trees must be >= 1");
  if (rows.empty()) throw InvalidArgumentError("Forest: empty row set");
  std::vector<Tree> trees(config.n_trees);
  ParallelFor(config.n_trees, [&](std::size_t i) {
    TreeConfig tc = config.tree;
    tc.seed = TreeSeed(config.seed, i);
    if (!config.bootstrap) {
      trees[i] = Tree::Grow(data, rows, tc);
      return;
    }
    Rng rng(DeriveSeed(tc.seed, kBootstrapStream));
    std::vector<std::size_t> sample(rows.size());
    for (auto& s : sample) s = rows[static_cast<std::size_t>(rng.UniformInt(rows.size()))];
    trees[i] = Tree::Grow(data, sample, tc);
  });
  Forest f;
  f.config_ = config;
  f.trees_ = std::move(trees);
  f.n_classes_ = data.n_classes();
  f.n_features_ = data.n_features();
  return f;
}

Forest Forest::Train(const Dataset& ds, std::span<const std::size_t> rows,
                     const ForestConfig& config) {
  return Train(ColumnarData(ds), rows, config);
}

void Forest::ClassVectorInto(std::span<const double> x, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  for (const auto& t : trees_) t.AccumulateDistribution(x, out);
  const double n = static_cast<double>(trees_.size());
  for (auto& v : out) v /= n;
}

ClassVector Forest::ClassVectorOf(std::span<const double> x) const {
  if (x.size() != n_features_) {
    throw DimensionMismatchError("Forest: input has " + std::to_string(x.size()) +
                                 " features, forest expects " + std::to_string(n_features_));
  }
  ClassVector out(n_classes_);
  ClassVectorInto(x, out);
  return out;
}

FeatureMatrix Forest::ClassVectors(const FeatureMatrix& x) const {
  if (x.cols() != n_features_) {
    throw DimensionMismatchError("Forest: input has " + std::to_string(x.cols()) +
                                 " features, forest expects " + std::to_string(n_features_));
  }
  FeatureMatrix out(x.rows(), n_classes_);
  const std::size_t blocks = (x.rows() + kRowBlock - 1) / kRowBlock;
  ParallelFor(blocks, [&](std::size_t b) {
    const std::size_t end = std::min(x.rows(), (b + 1) * kRowBlock);
    for (std::size_t i = b * kRowBlock; i < end; ++i) ClassVectorInto(x.row(i), out.row(i));
  });
  return out;
}

CvResult CvClassVectors(const ColumnarData& data, std::span<const std::size_t> rows,
                        const ForestConfig& config, std::size_t k, CvMode mode,
                        bool train_final) {
  if (k < 2) throw InvalidArgumentError("CvClassVectors: k must be >= 2");
  const std::size_t n = rows.size();
  const std::size_t n_classes = data.n_classes();
  std::vector<uint32_t> labels(n);
  std::vector<std::size_t> present(n_classes, 0);
  for (std::size_t i = 0; i < n; ++i) {
    labels[i] = data.label(rows[i]);
    ++present[labels[i]];
  }

  CvResult result;
  result.folds = StratifiedKFoldIndices(labels, n_classes, k,
                                        DeriveSeed(config.seed, kFoldStream));
  std::vector<uint32_t> fold_of(n);
  for (uint32_t j = 0; j < k; ++j) {
    for (const auto p : result.folds[j]) fold_of[p] = j;
  }

  std::vector<std::vector<std::size_t>> train_rows(k);
  for (uint32_t j = 0; j < k; ++j) {
    std::vector<std::size_t> counts(n_classes, 0);
    for (std::size_t p = 0; p < n; ++p) {
      if (fold_of[p] != j) {
        train_rows[j].push_back(rows[p]);
        ++counts[labels[p]];
      }
    }
    for (std::size_t c = 0; c < n_classes; ++c) {
      if (present[c] > 0 && counts[c] == 0) {
        throw DataError("CvClassVectors: training part of fold " + std::to_string(j) +
                        " has no instance of class " + std::to_string(c));
      }
    }
  }

  result.class_vectors = FeatureMatrix(n, n_classes);
  result.scorers.assign(n, {});
  for (uint32_t j = 0; j < k; ++j) {
    ForestConfig fc = config;
    fc.seed = DeriveSeed(config.seed, j + 1);
    const Forest model = Forest::Train(data, train_rows[j], fc);
    std::vector<std::size_t> scored;
    for (std::size_t p = 0; p < n; ++p) {
      const bool held_out = fold_of[p] == j;
      if (held_out == (mode == CvMode::kOutOfFold)) scored.push_back(p);
    }
    const std::size_t blocks = (scored.size() + kRowBlock - 1) / kRowBlock;
    ParallelFor(blocks, [&](std::size_t b) {
      std::vector<double> x(data.n_features());
      std::vector<double> buffer(n_classes);
      const std::size_t end = std::min(scored.size(), (b + 1) * kRowBlock);
      for (std::size_t s = b * kRowBlock; s < end; ++s) {
        const std::size_t p = scored[s];
        for (std::size_t f = 0; f < x.size(); ++f) x[f] = data.value(f, rows[p]);
        model.ClassVectorInto(x, buffer);
        auto out = result.class_vectors.row(p);
        for (std::size_t c = 0; c < n_classes; ++c) out[c] += buffer[c];
        result.scorers[p].push_back(j);
      }
    });
  }
  if (mode == CvMode::kInFoldAverage) {
    for (std::size_t p = 0; p < n; ++p) {
      const double m = static_cast<double>(result.scorers[p].size());
      for (auto& v : result.class_vectors.row(p)) v /= m;
    }
  }
  if (train_final) result.forest = Forest::Train(data, rows, config);
  return result;
}

}  // namespace deepforest
