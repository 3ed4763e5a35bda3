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

#ifndef DEEPFOREST_CASCADE_H_
#define DEEPFOREST_CASCADE_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "deepforest/dataset.h"
#include "deepforest/forest.h"

namespace deepforest {

struct LevelConfig {
  std::vector<ForestConfig> forests;
  std::size_t k_folds = 3;
  CvMode cv_mode = CvMode::kOutOfFold;

  // n_crt completely-random forests followed by n_rf random forests, no
  // depth cap.
  static LevelConfig Default(std::size_t n_trees = 500, std::size_t n_crt = 4,
                             std::size_t n_rf = 4);

  bool operator==(const LevelConfig&) const = default;
};

enum class TerminationCriterion : uint8_t {
  // Accuracy of the growth-phase cascade on a held-out estimating part.
  kEstimatingAccuracy = 0,
  // Accuracy of the cross-validated class vectors on the whole training
  // set; no data is held out.
  kTrainingAccuracy = 1,
};

struct TerminationConfig {
  TerminationCriterion criterion = TerminationCriterion::kEstimatingAccuracy;
  // A level counts as an improvement only if it beats the best accuracy so
  // far by more than this.
  double tolerance = 1e-6;
  // Growth stops after this many consecutive levels without improvement.
  std::size_t patience = 1;
  std::size_t max_levels = 20;
  // Share of the training rows in the growing part.
  double growing_fraction = 0.8;

  bool operator==(const TerminationConfig&) const = default;
};

struct TerminationRecord {
  TerminationCriterion criterion = TerminationCriterion::kEstimatingAccuracy;
  // Accuracy after each grown level.
  std::vector<double> level_accuracy;
  std::size_t chosen_levels = 0;

  std::size_t grown_levels() const { return level_accuracy.size(); }
  bool operator==(const TerminationRecord&) const = default;
};

class Level {
 public:
  Level() = default;
  Level(std::vector<Forest> forests, std::size_t input_dim, std::size_t n_classes);

  std::span<const Forest> forests() const { return forests_; }
  std::size_t input_dim() const { return input_dim_; }
  std::size_t n_classes() const { return n_classes_; }
  // |forests| * n_classes
  std::size_t output_dim() const { return forests_.size() * n_classes_; }

  // Per-row concatenation of every forest's class vector, forests in order.
  FeatureMatrix Augment(const FeatureMatrix& input) const;

  bool operator==(const Level&) const = default;

 private:
  std::vector<Forest> forests_;
  std::size_t input_dim_ = 0;
  std::size_t n_classes_ = 0;
};

struct LevelResult {
  // Forests retrained on every row.
  Level level;
  // Cross-validated augmentation of the training rows.
  FeatureMatrix augmentation;
};

// Input = base ++ previous (previous may have zero columns). Forest f gets
// seed DeriveSeed(seed, f).
LevelResult TrainLevel(const FeatureMatrix& base, const FeatureMatrix& previous,
                       std::span<const uint32_t> labels, std::size_t n_classes,
                       const LevelConfig& config, uint64_t seed);

// Ordered levels. Level l takes base features from source l mod
// n_sources, followed by the augmentation of level l - 1.
struct CascadeModel {
  std::vector<Level> levels;
  std::vector<std::size_t> source_widths;
  std::size_t n_classes = 0;
  TerminationRecord termination;

  std::size_t SourceOf(std::size_t level) const { return level % source_widths.size(); }
  bool operator==(const CascadeModel&) const = default;
};

struct LevelEvent {
  enum class Phase : uint8_t { kGrowing, kFinal };
  Phase phase;
  std::size_t level;      // 0-based
  double accuracy;        // growing phase only
  double seconds;         // wall clock for training and evaluating the level
};
using LevelObserver = std::function<void(const LevelEvent&)>;

// Grows levels until the termination rule fires, then retrains the chosen
// number of levels on all rows. `sources` are the per-source base feature
// matrices of the training rows (all with labels.size() rows).
CascadeModel GrowCascade(std::span<const FeatureMatrix> sources,
                         std::span<const uint32_t> labels, std::size_t n_classes,
                         const LevelConfig& level_config,
                         const TerminationConfig& termination, uint64_t seed,
                         const LevelObserver& observer = {});

// Last level's per-forest class vectors, one n x n_classes matrix per forest.
std::vector<FeatureMatrix> CascadeClassVectors(const CascadeModel& model,
                                               std::span<const FeatureMatrix> sources);

struct Prediction {
  std::vector<uint32_t> labels;
  // Mean of the final per-forest class vectors.
  FeatureMatrix aggregated;
};

// Argmax of the aggregated vector, lowest class index on ties.
Prediction Aggregate(std::span<const FeatureMatrix> final_vectors);
Prediction PredictCascade(const CascadeModel& model, std::span<const FeatureMatrix> sources);

}  // namespace deepforest

#endif  // DEEPFOREST_CASCADE_H_
