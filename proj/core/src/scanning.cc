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

#include "deepforest/scanning.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "deepforest/error.h"
#include "deepforest/parallel.h"
#include "deepforest/rng.h"

namespace deepforest {
namespace {

constexpr uint64_t kSubsampleStream = 0x7375627361ULL;
constexpr uint64_t kFoldStream = 0x67666f6c64ULL;
constexpr std::size_t kRowBlock = 16;

}  // namespace

GrainConfig GrainConfig::Default(WindowShape window, std::size_t n_trees) {
  GrainConfig g;
  g.window = window;
  ForestConfig crt = ForestConfig::CompletelyRandom(n_trees);
  ForestConfig rf = ForestConfig::RandomForest(n_trees);
  crt.tree.depth_cap = 100;
  rf.tree.depth_cap = 100;
  g.forests = {crt, rf};
  return g;
}

std::size_t WindowCount(std::size_t d, std::size_t window, std::size_t stride) {
  if (window == 0 || stride == 0) {
    throw InvalidArgumentError("WindowCount: window and stride must be positive");
  }
  if (window > d) {
    throw InvalidArgumentError("WindowCount: window " + std::to_string(window) +
                               " exceeds extent " + std::to_string(d));
  }
  return (d - window) / stride + 1;
}

std::size_t WindowCount(PanelShape panel, WindowShape window, std::size_t stride) {
  if (!window.is_panel()) throw InvalidArgumentError("WindowCount: panel window expected");
  return WindowCount(panel.height, window.height, stride) *
         WindowCount(panel.width, window.width, stride);
}

std::vector<std::vector<std::size_t>> WindowIndices(std::size_t n_features,
                                                    const std::optional<PanelShape>& panel,
                                                    WindowShape window, std::size_t stride) {
  std::vector<std::vector<std::size_t>> out;
  if (!window.is_panel()) {
    const std::size_t count = WindowCount(n_features, window.width, stride);
    out.resize(count);
    for (std::size_t p = 0; p < count; ++p) {
      out[p].resize(window.width);
      std::iota(out[p].begin(), out[p].end(), p * stride);
    }
    return out;
  }
  if (!panel) throw InvalidArgumentError("2-D window requested on data without a panel shape");
  if (panel->size() != n_features) {
    throw DimensionMismatchError("panel shape does not match the feature count");
  }
  const std::size_t rows = WindowCount(panel->height, window.height, stride);
  const std::size_t cols = WindowCount(panel->width, window.width, stride);
  out.reserve(rows * cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      std::vector<std::size_t> idx;
      idx.reserve(window.size());
      for (std::size_t i = 0; i < window.height; ++i) {
        for (std::size_t j = 0; j < window.width; ++j) {
          idx.push_back((r * stride + i) * panel->width + c * stride + j);
        }
      }
      out.push_back(std::move(idx));
    }
  }
  return out;
}

Dataset ExtractInstances(const Dataset& ds, const GrainConfig& grain, uint64_t seed) {
  if (!ds.has_labels()) throw InvalidArgumentError("ExtractInstances: labels required");
  const auto windows = WindowIndices(ds.n_features(), ds.panel_shape(), grain.window,
                                     grain.stride);
  const std::size_t total = ds.n_rows() * windows.size();
  std::vector<std::size_t> keep;
  if (grain.subsample) {
    const double rate = *grain.subsample;
    if (!(rate > 0.0 && rate <= 1.0)) {
      throw InvalidArgumentError("subsample rate must lie in (0, 1]");
    }
    const auto count = static_cast<std::size_t>(std::ceil(rate * static_cast<double>(total)));
    std::vector<std::size_t> all(total);
    std::iota(all.begin(), all.end(), 0);
    // Partial Fisher-Yates: the first `count` entries are a uniform sample.
    Rng rng(DeriveSeed(seed, kSubsampleStream));
    for (std::size_t i = 0; i < count; ++i) {
      std::swap(all[i], all[i + static_cast<std::size_t>(rng.UniformInt(total - i))]);
    }
    keep.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(count));
    std::sort(keep.begin(), keep.end());
  } else {
    keep.resize(total);
    std::iota(keep.begin(), keep.end(), 0);
  }

  const std::size_t width = grain.window.size();
  FeatureMatrix features(keep.size(), width);
  std::vector<uint32_t> labels(keep.size());
  std::vector<std::size_t> provenance(keep.size());
  for (std::size_t i = 0; i < keep.size(); ++i) {
    const std::size_t example = keep[i] / windows.size();
    const auto& idx = windows[keep[i] % windows.size()];
    const auto src = ds.row(example);
    auto dst = features.row(i);
    for (std::size_t j = 0; j < width; ++j) dst[j] = src[idx[j]];
    labels[i] = ds.label(example);
    provenance[i] = example;
  }
  Dataset out(std::move(features), std::move(labels), ds.n_classes());
  out.set_provenance(std::move(provenance));
  return out;
}

GrainTransformer::GrainTransformer(GrainConfig config, std::vector<Forest> forests,
                                   std::size_t raw_dim, std::optional<PanelShape> panel,
                                   std::size_t n_classes)
    : config_(std::move(config)),
      forests_(std::move(forests)),
      raw_dim_(raw_dim),
      panel_(panel),
      n_classes_(n_classes) {
  if (forests_.empty()) throw InvalidArgumentError("GrainTransformer: no forests");
  windows_ = WindowIndices(raw_dim_, panel_, config_.window, config_.stride);
  for (const auto& f : forests_) {
    if (f.n_features() != config_.window.size() || f.n_classes() != n_classes_) {
      throw InvalidArgumentError("GrainTransformer: forest shape disagrees with the window");
    }
  }
}

void GrainTransformer::TransformInto(std::span<const double> x, std::span<double> out,
                                     std::vector<double>& window) const {
  std::size_t pos = 0;
  window.resize(config_.window.size());
  for (const auto& idx : windows_) {
    for (std::size_t j = 0; j < idx.size(); ++j) window[j] = x[idx[j]];
    for (const auto& f : forests_) {
      f.ClassVectorInto(window, out.subspan(pos, n_classes_));
      pos += n_classes_;
    }
  }
}

std::vector<double> GrainTransformer::Transform(std::span<const double> x) const {
  if (x.size() != raw_dim_) {
    throw DimensionMismatchError("GrainTransformer: input has " + std::to_string(x.size()) +
                                 " features, expected " + std::to_string(raw_dim_));
  }
  std::vector<double> out(output_dim());
  std::vector<double> window;
  TransformInto(x, out, window);
  return out;
}

FeatureMatrix GrainTransformer::TransformBatch(const FeatureMatrix& x) const {
  if (x.cols() != raw_dim_) {
    throw DimensionMismatchError("GrainTransformer: input has " + std::to_string(x.cols()) +
                                 " features, expected " + std::to_string(raw_dim_));
  }
  FeatureMatrix out(x.rows(), output_dim());
  const std::size_t blocks = (x.rows() + kRowBlock - 1) / kRowBlock;
  ParallelFor(blocks, [&](std::size_t b) {
    std::vector<double> window;
    const std::size_t end = std::min(x.rows(), (b + 1) * kRowBlock);
    for (std::size_t i = b * kRowBlock; i < end; ++i) TransformInto(x.row(i), out.row(i), window);
  });
  return out;
}

GrainTransformer FitGrain(const Dataset& ds, const GrainConfig& grain, uint64_t seed) {
  if (grain.forests.empty()) throw InvalidArgumentError("FitGrain: grain has no forests");
  const Dataset instances = ExtractInstances(ds, grain, seed);
  const ColumnarData data(instances);
  std::vector<std::size_t> rows(instances.n_rows());
  std::iota(rows.begin(), rows.end(), 0);
  std::vector<Forest> forests;
  for (std::size_t f = 0; f < grain.forests.size(); ++f) {
    ForestConfig fc = grain.forests[f];
    fc.seed = DeriveSeed(seed, f);
    forests.push_back(Forest::Train(data, rows, fc));
  }
  return GrainTransformer(grain, std::move(forests), ds.n_features(), ds.panel_shape(),
                          ds.n_classes());
}

FeatureMatrix OutOfFoldTransform(const Dataset& ds, const GrainConfig& grain, uint64_t seed,
                                 std::size_t k) {
  const auto folds = StratifiedKFoldIndices(ds.labels(), ds.n_classes(), k,
                                            DeriveSeed(seed, kFoldStream));
  FeatureMatrix out;
  for (std::size_t j = 0; j < folds.size(); ++j) {
    std::vector<std::size_t> train;
    std::vector<bool> held(ds.n_rows(), false);
    for (const auto i : folds[j]) held[i] = true;
    for (std::size_t i = 0; i < ds.n_rows(); ++i) {
      if (!held[i]) train.push_back(i);
    }
    const GrainTransformer t = FitGrain(ds.Subset(train), grain, DeriveSeed(seed, j + 1));
    if (j == 0) out = FeatureMatrix(ds.n_rows(), t.output_dim());
    const FeatureMatrix part = t.TransformBatch(ds.features().SelectRows(folds[j]));
    for (std::size_t r = 0; r < folds[j].size(); ++r) {
      std::copy(part.row(r).begin(), part.row(r).end(), out.row(folds[j][r]).begin());
    }
  }
  return out;
}

std::vector<std::size_t> DefaultWindows(std::size_t d) {
  if (d < 16) {
    throw InvalidArgumentError("default windows need at least 16 features (got " +
                               std::to_string(d) + "); give explicit window sizes");
  }
  std::vector<std::size_t> out;
  for (const std::size_t div : {16, 8, 4}) {
    const std::size_t w = d / div;
    if (std::find(out.begin(), out.end(), w) == out.end()) out.push_back(w);
  }
  return out;
}

}  // namespace deepforest
