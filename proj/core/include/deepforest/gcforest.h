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

#ifndef DEEPFOREST_GCFOREST_H_
#define DEEPFOREST_GCFOREST_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "deepforest/cascade.h"
#include "deepforest/dataset.h"
#include "deepforest/scanning.h"

namespace deepforest {

enum class Variant : uint8_t {
  // Level l uses grain (l mod G) as base features (cascade of cascades).
  kGrainCycle = 0,
  // All grain outputs concatenated into one base feature set.
  kConcatenated = 1,
  // Raw features at every level, no scanning.
  kCascadeOnly = 2,
};

struct GcConfig {
  Variant variant = Variant::kGrainCycle;
  std::vector<GrainConfig> grains;
  LevelConfig level = LevelConfig::Default();
  TerminationConfig termination;
  // When set, the cascade trains on out-of-fold grain outputs: example i is
  // transformed by grain forests that never saw its windows.
  bool oof_scanning = false;
  std::size_t scanning_folds = 3;
  uint64_t seed = 0;

  // Throws InvalidArgumentError for inconsistent settings.
  void Validate() const;
  bool operator==(const GcConfig&) const = default;
};

// Grains for every default window size of a d-feature (or panel) input.
std::vector<GrainConfig> DefaultGrains(std::size_t n_features,
                                       const std::optional<PanelShape>& panel,
                                       std::size_t n_trees = 500);

class GcModel {
 public:
  GcModel() = default;
  GcModel(GcConfig config, std::vector<GrainTransformer> grains, CascadeModel cascade,
          LabelMap labels, std::size_t raw_dim, std::optional<PanelShape> panel,
          std::size_t n_classes);

  const GcConfig& config() const { return config_; }
  std::span<const GrainTransformer> grains() const { return grains_; }
  const CascadeModel& cascade() const { return cascade_; }
  const LabelMap& labels() const { return labels_; }
  std::size_t raw_dim() const { return raw_dim_; }
  const std::optional<PanelShape>& panel() const { return panel_; }
  std::size_t n_classes() const { return n_classes_; }

  // Base feature matrices of the cascade for raw inputs x.
  std::vector<FeatureMatrix> Sources(const FeatureMatrix& x) const;
  Prediction PredictBatch(const FeatureMatrix& x) const;
  Prediction PredictBatch(const Dataset& ds) const { return PredictBatch(ds.features()); }

  bool operator==(const GcModel&) const = default;

 private:
  GcConfig config_;
  std::vector<GrainTransformer> grains_;
  CascadeModel cascade_;
  LabelMap labels_;
  std::size_t raw_dim_ = 0;
  std::optional<PanelShape> panel_;
  std::size_t n_classes_ = 0;
};

// Pure function of (train, config). `observer` sees per-level timings.
GcModel Fit(const Dataset& train, const GcConfig& config, const LevelObserver& observer = {});

}  // namespace deepforest

#endif  // DEEPFOREST_GCFOREST_H_
