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

#ifndef DEEPFOREST_SCANNING_H_
#define DEEPFOREST_SCANNING_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "deepforest/dataset.h"
#include "deepforest/forest.h"

namespace deepforest {

// Sliding-window extent. height == 0 marks a 1-D (sequence) window over the
// flat feature vector; otherwise a height x width window over the panel.
struct WindowShape {
  std::size_t height = 0;
  std::size_t width = 0;

  static WindowShape Sequence(std::size_t length) { return {0, length}; }
  static WindowShape Panel(std::size_t height, std::size_t width) { return {height, width}; }

  bool is_panel() const { return height > 0; }
  std::size_t size() const { return is_panel() ? height * width : width; }
  bool operator==(const WindowShape&) const = default;
};

struct GrainConfig {
  WindowShape window;
  std::size_t stride = 1;
  // Fraction of extracted instances kept for training the grain forests.
  std::optional<double> subsample;
  // Applied in order; each forest's seed is replaced by one derived from the
  // grain seed.
  std::vector<ForestConfig> forests;

  // One completely-random and one random forest, depth cap 100.
  static GrainConfig Default(WindowShape window, std::size_t n_trees = 500);

  bool operator==(const GrainConfig&) const = default;
};

// floor((d - w) / stride) + 1. Throws InvalidArgumentError when the window
// is empty, larger than d, or stride is 0.
std::size_t WindowCount(std::size_t d, std::size_t window, std::size_t stride = 1);
// Product of the per-axis counts.
std::size_t WindowCount(PanelShape panel, WindowShape window, std::size_t stride = 1);

// Feature indices of every window position, positions in row-major order,
// indices inside a window row-major too.
std::vector<std::vector<std::size_t>> WindowIndices(std::size_t n_features,
                                                    const std::optional<PanelShape>& panel,
                                                    WindowShape window, std::size_t stride);

// One instance per (example, window position), examples outer. Each
// instance carries its source example's label and index (provenance). With
// subsample = r, ceil(r * count) instances are kept, chosen uniformly without
// replacement from `seed`, original order preserved.
Dataset ExtractInstances(const Dataset& ds, const GrainConfig& grain, uint64_t seed = 0);

class GrainTransformer {
 public:
  GrainTransformer() = default;
  GrainTransformer(GrainConfig config, std::vector<Forest> forests, std::size_t raw_dim,
                   std::optional<PanelShape> panel, std::size_t n_classes);

  const GrainConfig& config() const { return config_; }
  std::span<const Forest> forests() const { return forests_; }
  std::size_t raw_dim() const { return raw_dim_; }
  const std::optional<PanelShape>& panel() const { return panel_; }
  std::size_t n_classes() const { return n_classes_; }
  std::size_t n_windows() const { return windows_.size(); }
  // n_windows * n_classes * |forests|
  std::size_t output_dim() const { return windows_.size() * n_classes_ * forests_.size(); }

  // Window-major, then forest order, one class vector each.
  std::vector<double> Transform(std::span<const double> x) const;
  FeatureMatrix TransformBatch(const FeatureMatrix& x) const;

  bool operator==(const GrainTransformer& other) const {
    return config_ == other.config_ && forests_ == other.forests_ &&
           raw_dim_ == other.raw_dim_ && panel_ == other.panel_ &&
           n_classes_ == other.n_classes_;
  }

 private:
  void TransformInto(std::span<const double> x, std::span<double> out,
                     std::vector<double>& window) const;

  GrainConfig config_;
  std::vector<Forest> forests_;
  std::size_t raw_dim_ = 0;
  std::optional<PanelShape> panel_;
  std::size_t n_classes_ = 0;
  std::vector<std::vector<std::size_t>> windows_;
};

// Trains the grain forests on all extracted instances (no cross-validation).
GrainTransformer FitGrain(const Dataset& ds, const GrainConfig& grain, uint64_t seed);

// Transformed training features where example i is transformed by grain
// forests fitted on the extracted instances of the other folds only (folds
// over examples, stratified). k >= 2.
FeatureMatrix OutOfFoldTransform(const Dataset& ds, const GrainConfig& grain, uint64_t seed,
                                 std::size_t k);

// {floor(d/16), floor(d/8), floor(d/4)} without duplicates. d < 16 is an
// error: pass explicit windows instead.
std::vector<std::size_t> DefaultWindows(std::size_t d);

}  // namespace deepforest

#endif  // DEEPFOREST_SCANNING_H_
