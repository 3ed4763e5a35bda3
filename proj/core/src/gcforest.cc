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

#include "deepforest/gcforest.h"

#include <string>
#include <utility>

#include "deepforest/error.h"
#include "deepforest/rng.h"

namespace deepforest {
namespace {

constexpr uint64_t kGrainStream = 0x677261696eULL;
constexpr uint64_t kCascadeStream = 0x6361736361ULL;

std::vector<FeatureMatrix> Arrange(Variant variant, std::vector<FeatureMatrix> grain_outputs,
                                   const FeatureMatrix& raw) {
  if (variant == Variant::kCascadeOnly) return {raw};
  if (variant == Variant::kGrainCycle) return grain_outputs;
  FeatureMatrix joined = std::move(grain_outputs.front());
  for (std::size_t g = 1; g < grain_outputs.size(); ++g) {
    joined = FeatureMatrix::ConcatColumns(joined, grain_outputs[g]);
  }
  return {std::move(joined)};
}

}  // namespace

void GcConfig::Validate() const {
  if (variant == Variant::kCascadeOnly && !grains.empty()) {
    throw InvalidArgumentError("cascade-only variant takes no grains");
  }
  if (variant != Variant::kCascadeOnly && grains.empty()) {
    throw InvalidArgumentError("grain-cycle and concatenated variants need at least one grain");
  }
  if (level.forests.empty()) throw InvalidArgumentError("cascade level has no forests");
  if (level.k_folds < 2) throw InvalidArgumentError("k_folds must be >= 2");
  const auto check_trees = [](const std::vector<ForestConfig>& forests) {
    for (const auto& f : forests) {
      if (f.n_trees == 0) throw InvalidArgumentError("forest needs at least one tree");
    }
  };
  check_trees(level.forests);
  for (const auto& g : grains) {
    if (g.forests.empty()) throw InvalidArgumentError("grain has no forests");
    if (g.window.size() == 0 || g.stride == 0) {
      throw InvalidArgumentError("grain window and stride must be positive");
    }
    check_trees(g.forests);
  }
  if (!(termination.growing_fraction > 0.0 && termination.growing_fraction < 1.0)) {
    throw InvalidArgumentError("growing fraction must lie in (0, 1)");
  }
  if (termination.max_levels == 0 || termination.patience == 0) {
    throw InvalidArgumentError("max_levels and patience must be >= 1");
  }
  if (oof_scanning && scanning_folds < 2) {
    throw InvalidArgumentError("scanning_folds must be >= 2");
  }
}

std::vector<GrainConfig> DefaultGrains(std::size_t n_features,
                                       const std::optional<PanelShape>& panel,
                                       std::size_t n_trees) {
  std::vector<GrainConfig> out;
  if (panel) {
    const auto heights = DefaultWindows(panel->height);
    const auto widths = DefaultWindows(panel->width);
    for (std::size_t i = 0; i < heights.size() && i < widths.size(); ++i) {
      out.push_back(GrainConfig::Default(WindowShape::Panel(heights[i], widths[i]), n_trees));
    }
    return out;
  }
  for (const auto w : DefaultWindows(n_features)) {
    out.push_back(GrainConfig::Default(WindowShape::Sequence(w), n_trees));
  }
  return out;
}

GcModel::GcModel(GcConfig config, std::vector<GrainTransformer> grains, CascadeModel cascade,
                 LabelMap labels, std::size_t raw_dim, std::optional<PanelShape> panel,
                 std::size_t n_classes)
    : config_(std::move(config)),
      grains_(std::move(grains)),
      cascade_(std::move(cascade)),
      labels_(std::move(labels)),
      raw_dim_(raw_dim),
      panel_(panel),
      n_classes_(n_classes) {}

std::vector<FeatureMatrix> GcModel::Sources(const FeatureMatrix& x) const {
  if (x.cols() != raw_dim_) {
    throw DimensionMismatchError("model expects " + std::to_string(raw_dim_) +
                                 " features, input has " + std::to_string(x.cols()));
  }
  std::vector<FeatureMatrix> outputs;
  for (const auto& g : grains_) outputs.push_back(g.TransformBatch(x));
  return Arrange(config_.variant, std::move(outputs), x);
}

Prediction GcModel::PredictBatch(const FeatureMatrix& x) const {
  const auto sources = Sources(x);
  return PredictCascade(cascade_, sources);
}

GcModel Fit(const Dataset& train, const GcConfig& config, const LevelObserver& observer) {
  config.Validate();
  if (!train.has_labels()) throw InvalidArgumentError("Fit: training data needs labels");
  if (train.n_rows() == 0) throw InvalidArgumentError("Fit: empty training set");

  std::vector<GrainTransformer> grains;
  std::vector<FeatureMatrix> outputs;
  for (std::size_t g = 0; g < config.grains.size(); ++g) {
    const uint64_t seed = DeriveSeed(config.seed, kGrainStream + g);
    grains.push_back(FitGrain(train, config.grains[g], seed));
    if (config.oof_scanning) {
      outputs.push_back(OutOfFoldTransform(train, config.grains[g], seed, config.scanning_folds));
    } else {
      outputs.push_back(grains.back().TransformBatch(train.features()));
    }
  }
  const auto sources = Arrange(config.variant, std::move(outputs), train.features());
  CascadeModel cascade =
      GrowCascade(sources, train.labels(), train.n_classes(), config.level, config.termination,
                  DeriveSeed(config.seed, kCascadeStream), observer);
  return GcModel(config, std::move(grains), std::move(cascade), train.label_map(),
                 train.n_features(), train.panel_shape(), train.n_classes());
}

}  // namespace deepforest
