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

#ifndef DEEPFOREST_FOREST_H_
#define DEEPFOREST_FOREST_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "deepforest/dataset.h"
#include "deepforest/tree.h"

namespace deepforest {

struct ForestConfig {
  // tree.seed is ignored; every tree gets TreeSeed(seed, index).
  TreeConfig tree;
  std::size_t n_trees = 500;
  bool bootstrap = true;
  uint64_t seed = 0;

  // Gini trees on sqrt(d) candidates, bootstrap samples.
  static ForestConfig RandomForest(std::size_t n_trees = 500);
  // Completely-random trees on the full row set.
  static ForestConfig CompletelyRandom(std::size_t n_trees = 500);

  bool operator==(const ForestConfig&) const = default;
};

// Seed of tree `index` in a forest seeded with `forest_seed`.
uint64_t TreeSeed(uint64_t forest_seed, std::size_t index);

class Forest {
 public:
  Forest() = default;
  // Assembles a forest from already grown trees (deserialization).
  Forest(ForestConfig config, std::vector<Tree> trees, std::size_t n_classes,
         std::size_t n_features);

  // Tree i is grown from TreeSeed(config.seed, i); with bootstrap it sees
  // |rows| draws with replacement from a stream derived from that seed.
  // The result does not depend on the thread count.
  static Forest Train(const ColumnarData& data, std::span<const std::size_t> rows,
                      const ForestConfig& config);
  static Forest Train(const Dataset& ds, std::span<const std::size_t> rows,
                      const ForestConfig& config);

  const ForestConfig& config() const { return config_; }
  std::span<const Tree> trees() const { return trees_; }
  std::size_t n_classes() const { return n_classes_; }
  std::size_t n_features() const { return n_features_; }

  // Mean of the tree leaf distributions.
  ClassVector ClassVectorOf(std::span<const double> x) const;
  // Writes ClassVectorOf(x) into out (size n_classes); no dimension check.
  void ClassVectorInto(std::span<const double> x, std::span<double> out) const;
  // One row of n_classes probabilities per input row. Rows are evaluated in
  // parallel; each value equals ClassVectorOf on that row bit for bit.
  FeatureMatrix ClassVectors(const FeatureMatrix& x) const;

  bool operator==(const Forest&) const = default;

 private:
  ForestConfig config_;
  std::vector<Tree> trees_;
  std::size_t n_classes_ = 0;
  std::size_t n_features_ = 0;
};

enum class CvMode : uint8_t {
  // Each row is scored by the one fold model that did not train on it.
  kOutOfFold = 0,
  // Each row gets the mean of the k-1 fold models that did train on it.
  // Leaks labels; kept for comparison runs.
  kInFoldAverage = 1,
};

struct CvResult {
  // |rows| x n_classes, row i belongs to rows[i].
  FeatureMatrix class_vectors;
  // Forest trained on all of rows (empty if not requested).
  Forest forest;
  // Positions into rows; fold model j trained on every position not in
  // folds[j].
  std::vector<std::vector<std::size_t>> folds;
  // Fold models that contributed to each row's vector.
  std::vector<std::vector<uint32_t>> scorers;
};

// k-fold class vectors for stacking. Folds are stratified by label. Fold
// model j uses seed DeriveSeed(config.seed, j + 1); the final forest uses
// config.seed. Throws DataError when a fold's training part lacks a class
// present in rows.
CvResult CvClassVectors(const ColumnarData& data, std::span<const std::size_t> rows,
                        const ForestConfig& config, std::size_t k,
                        CvMode mode = CvMode::kOutOfFold, bool train_final = true);

}  // namespace deepforest

#endif  // DEEPFOREST_FOREST_H_
