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

#include <chrono>
#include <numeric>
#include <string>
#include <utility>

#include "deepforest/error.h"
#include "deepforest/metrics.h"
#include "deepforest/rng.h"

namespace deepforest {
namespace {

constexpr uint64_t kSplitStream = 0x73706c6974ULL;
constexpr uint64_t kLevelStream = 0x6c6576656cULL;

uint64_t LevelSeed(uint64_t seed, std::size_t level) {
  return DeriveSeed(DeriveSeed(seed, kLevelStream), level);
}

// Aggregated argmax of a concatenated per-forest class-vector table.
std::vector<uint32_t> PredictFromAugmentation(const FeatureMatrix& aug, std::size_t n_classes) {
  const std::size_t n_forests = aug.cols() / n_classes;
  std::vector<uint32_t> out(aug.rows());
  std::vector<double> mean(n_classes);
  for (std::size_t i = 0; i < aug.rows(); ++i) {
    const auto row = aug.row(i);
    std::fill(mean.begin(), mean.end(), 0.0);
    for (std::size_t f = 0; f < n_forests; ++f) {
      for (std::size_t c = 0; c < n_classes; ++c) mean[c] += row[f * n_classes + c];
    }
    for (auto& v : mean) v /= static_cast<double>(n_forests);
    out[i] = ArgMax(mean);
  }
  return out;
}

std::vector<uint32_t> Gather(std::span<const uint32_t> labels,
                             std::span<const std::size_t> rows) {
  std::vector<uint32_t> out(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) out[i] = labels[rows[i]];
  return out;
}

void CheckSources(std::span<const FeatureMatrix> sources, std::size_t n_rows) {
  if (sources.empty()) throw InvalidArgumentError("cascade: no feature sources");
  for (const auto& s : sources) {
    if (s.rows() != n_rows) {
      throw DimensionMismatchError("cascade: feature sources disagree on the row count");
    }
  }
}

}  // namespace

LevelConfig LevelConfig::Default(std::size_t n_trees, std::size_t n_crt, std::size_t n_rf) {
  LevelConfig c;
  for (std::size_t i = 0; i < n_crt; ++i) c.forests.push_back(ForestConfig::CompletelyRandom(n_trees));
  for (std::size_t i = 0; i < n_rf; ++i) c.forests.push_back(ForestConfig::RandomForest(n_trees));
  return c;
}

Level::Level(std::vector<Forest> forests, std::size_t input_dim, std::size_t n_classes)
    : forests_(std::move(forests)), input_dim_(input_dim), n_classes_(n_classes) {
  if (forests_.empty()) throw InvalidArgumentError("Level: no forests");
  for (const auto& f : forests_) {
    if (f.n_features() != input_dim_ || f.n_classes() != n_classes_) {
      throw InvalidArgumentError("Level: forest shape disagrees with the level");
    }
  }
}

FeatureMatrix Level::Augment(const FeatureMatrix& input) const {
  if (input.cols() != input_dim_) {
    throw DimensionMismatchError("Level: input has " + std::to_string(input.cols()) +
                                 " columns, level expects " + std::to_string(input_dim_));
  }
  FeatureMatrix out(input.rows(), output_dim());
  for (std::size_t f = 0; f < forests_.size(); ++f) {
    const FeatureMatrix v = forests_[f].ClassVectors(input);
    for (std::size_t i = 0; i < input.rows(); ++i) {
      std::copy(v.row(i).begin(), v.row(i).end(), out.row(i).begin() + f * n_classes_);
    }
  }
  return out;
}

LevelResult TrainLevel(const FeatureMatrix& base, const FeatureMatrix& previous,
                       std::span<const uint32_t> labels, std::size_t n_classes,
                       const LevelConfig& config, uint64_t seed) {
  if (config.forests.empty()) throw InvalidArgumentError("TrainLevel: no forests configured");
  if (base.rows() != labels.size()) {
    throw DimensionMismatchError("TrainLevel: base rows differ from label count");
  }
  const FeatureMatrix input = FeatureMatrix::ConcatColumns(base, previous);
  const ColumnarData data(input, labels, n_classes);
  std::vector<std::size_t> rows(input.rows());
  std::iota(rows.begin(), rows.end(), 0);

  LevelResult result;
  result.augmentation = FeatureMatrix(input.rows(), config.forests.size() * n_classes);
  std::vector<Forest> forests;
  for (std::size_t f = 0; f < config.forests.size(); ++f) {
    ForestConfig fc = config.forests[f];
    fc.seed = DeriveSeed(seed, f);
    CvResult cv = CvClassVectors(data, rows, fc, config.k_folds, config.cv_mode);
    for (std::size_t i = 0; i < input.rows(); ++i) {
      const auto v = cv.class_vectors.row(i);
      std::copy(v.begin(), v.end(), result.augmentation.row(i).begin() + f * n_classes);
    }
    forests.push_back(std::move(cv.forest));
  }
  result.level = Level(std::move(forests), input.cols(), n_classes);
  return result;
}

CascadeModel GrowCascade(std::span<const FeatureMatrix> sources,
                         std::span<const uint32_t> labels, std::size_t n_classes,
                         const LevelConfig& level_config,
                         const TerminationConfig& termination, uint64_t seed,
                         const LevelObserver& observer) {
  CheckSources(sources, labels.size());
  if (termination.max_levels == 0) throw InvalidArgumentError("max_levels must be >= 1");
  if (termination.patience == 0) throw InvalidArgumentError("patience must be >= 1");
  using Clock = std::chrono::steady_clock;
  const auto elapsed = [](Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
  };

  CascadeModel model;
  model.n_classes = n_classes;
  for (const auto& s : sources) model.source_widths.push_back(s.cols());
  model.termination.criterion = termination.criterion;

  const bool held_out = termination.criterion == TerminationCriterion::kEstimatingAccuracy;
  SplitIndices split;
  if (held_out) {
    split = StratifiedSplitIndices(labels, n_classes, termination.growing_fraction,
                                   DeriveSeed(seed, kSplitStream));
  } else {
    split.growing.resize(labels.size());
    std::iota(split.growing.begin(), split.growing.end(), 0);
  }
  const std::vector<uint32_t> grow_labels = Gather(labels, split.growing);
  const std::vector<uint32_t> est_labels = Gather(labels, split.estimating);
  std::vector<FeatureMatrix> grow_sources;
  std::vector<FeatureMatrix> est_sources;
  for (const auto& s : sources) {
    grow_sources.push_back(s.SelectRows(split.growing));
    if (held_out) est_sources.push_back(s.SelectRows(split.estimating));
  }

  // Growth phase. Levels grown on the growing part are only kept when no
  // rows were held out (they are then already trained on everything).
  FeatureMatrix grow_aug(grow_labels.size(), 0);
  FeatureMatrix est_aug(est_labels.size(), 0);
  double best = -1.0;
  std::size_t stall = 0;
  std::vector<Level> grown;
  for (std::size_t l = 0; l < termination.max_levels; ++l) {
    const auto t0 = Clock::now();
    const std::size_t s = model.SourceOf(l);
    LevelResult r = TrainLevel(grow_sources[s], grow_aug, grow_labels, n_classes,
                               level_config, LevelSeed(seed, l));
    double accuracy;
    if (held_out) {
      est_aug = r.level.Augment(FeatureMatrix::ConcatColumns(est_sources[s], est_aug));
      accuracy = Accuracy(PredictFromAugmentation(est_aug, n_classes), est_labels);
    } else {
      accuracy = Accuracy(PredictFromAugmentation(r.augmentation, n_classes), grow_labels);
      grown.push_back(std::move(r.level));
    }
    grow_aug = std::move(r.augmentation);
    model.termination.level_accuracy.push_back(accuracy);
    if (observer) observer({LevelEvent::Phase::kGrowing, l, accuracy, elapsed(t0)});

    if (accuracy > best + termination.tolerance) {
      best = accuracy;
      model.termination.chosen_levels = l + 1;
      stall = 0;
    } else if (++stall >= termination.patience) {
      break;
    }
  }

  const std::size_t chosen = model.termination.chosen_levels;
  if (!held_out) {
    grown.resize(chosen);
    model.levels = std::move(grown);
    return model;
  }

  // Retrain the chosen number of levels on growing + estimating rows.
  FeatureMatrix aug(labels.size(), 0);
  for (std::size_t l = 0; l < chosen; ++l) {
    const auto t0 = Clock::now();
    LevelResult r = TrainLevel(sources[model.SourceOf(l)], aug, labels, n_classes,
                               level_config, LevelSeed(seed, l));
    aug = std::move(r.augmentation);
    model.levels.push_back(std::move(r.level));
    if (observer) observer({LevelEvent::Phase::kFinal, l, 0.0, elapsed(t0)});
  }
  return model;
}

std::vector<FeatureMatrix> CascadeClassVectors(const CascadeModel& model,
                                               std::span<const FeatureMatrix> sources) {
  if (model.levels.empty()) throw InvalidArgumentError("cascade model has no levels");
  if (sources.size() != model.source_widths.size()) {
    throw DimensionMismatchError("cascade: expected " +
                                 std::to_string(model.source_widths.size()) +
                                 " feature sources, got " + std::to_string(sources.size()));
  }
  CheckSources(sources, sources.front().rows());
  for (std::size_t s = 0; s < sources.size(); ++s) {
    if (sources[s].cols() != model.source_widths[s]) {
      throw DimensionMismatchError("cascade: source " + std::to_string(s) + " has " +
                                   std::to_string(sources[s].cols()) + " columns, expected " +
                                   std::to_string(model.source_widths[s]));
    }
  }
  FeatureMatrix aug(sources.front().rows(), 0);
  for (std::size_t l = 0; l < model.levels.size(); ++l) {
    aug = model.levels[l].Augment(FeatureMatrix::ConcatColumns(sources[model.SourceOf(l)], aug));
  }
  const std::size_t nc = model.n_classes;
  const std::size_t n_forests = aug.cols() / nc;
  std::vector<FeatureMatrix> out(n_forests, FeatureMatrix(aug.rows(), nc));
  for (std::size_t f = 0; f < n_forests; ++f) {
    for (std::size_t i = 0; i < aug.rows(); ++i) {
      const auto src = aug.row(i).subspan(f * nc, nc);
      std::copy(src.begin(), src.end(), out[f].row(i).begin());
    }
  }
  return out;
}

Prediction Aggregate(std::span<const FeatureMatrix> final_vectors) {
  if (final_vectors.empty()) throw InvalidArgumentError("Aggregate: no class vectors");
  const std::size_t n = final_vectors.front().rows();
  const std::size_t nc = final_vectors.front().cols();
  Prediction p;
  p.aggregated = FeatureMatrix(n, nc);
  p.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto out = p.aggregated.row(i);
    for (const auto& v : final_vectors) {
      if (v.rows() != n || v.cols() != nc) {
        throw DimensionMismatchError("Aggregate: class vector tables differ in shape");
      }
      for (std::size_t c = 0; c < nc; ++c) out[c] += v.at(i, c);
    }
    for (auto& x : out) x /= static_cast<double>(final_vectors.size());
    p.labels[i] = ArgMax(out);
  }
  return p;
}

Prediction PredictCascade(const CascadeModel& model, std::span<const FeatureMatrix> sources) {
  const auto vectors = CascadeClassVectors(model, sources);
  return Aggregate(vectors);
}

}  // namespace deepforest
