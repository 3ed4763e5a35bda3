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

#include "deepforest/synthetic.h"

#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include "deepforest/error.h"
#include "deepforest/rng.h"

namespace deepforest {
namespace {

double Normal(Rng& rng) {
  // Box-Muller; one draw per call keeps the stream simple.
  const double u = rng.UniformOpen();
  const double v = rng.UniformOpen();
  return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * std::numbers::pi * v);
}

}  // namespace

Dataset WindowSignalData(const WindowSignalConfig& config, std::size_t n, uint64_t sample_seed) {
  if (config.motif_length == 0 || config.motif_length > config.length) {
    throw InvalidArgumentError("WindowSignalData: motif must fit the sequence");
  }
  if (config.n_classes < 2) throw InvalidArgumentError("WindowSignalData: need >= 2 classes");
  const std::size_t m = config.motif_length;

  std::vector<double> values(m);
  for (std::size_t i = 0; i < m; ++i) {
    values[i] = m == 1 ? config.motif_amplitude
                       : config.motif_amplitude *
                             (2.0 * static_cast<double>(i) / static_cast<double>(m - 1) - 1.0);
  }
  std::vector<std::vector<double>> motifs(config.n_classes, values);
  Rng motif_rng(config.seed);
  for (auto& motif : motifs) motif_rng.Shuffle(std::span<double>(motif));

  Rng rng(sample_seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  rng.Shuffle(std::span<std::size_t>(order));

  FeatureMatrix features(n, config.length);
  std::vector<uint32_t> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto label = static_cast<uint32_t>(order[i] % config.n_classes);
    labels[i] = label;
    auto row = features.row(i);
    for (auto& x : row) x = config.noise * Normal(rng);
    const std::size_t start =
        static_cast<std::size_t>(rng.UniformInt(config.length - m + 1));
    for (std::size_t j = 0; j < m; ++j) {
      row[start + j] = motifs[label][j] + 0.25 * config.noise * Normal(rng);
    }
  }
  return Dataset(std::move(features), std::move(labels), config.n_classes);
}

Dataset SeparableData(std::size_t n, std::size_t n_features, uint64_t seed) {
  if (n_features == 0) throw InvalidArgumentError("SeparableData: need >= 1 feature");
  Rng rng(seed);
  FeatureMatrix features(n, n_features);
  std::vector<uint32_t> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    labels[i] = static_cast<uint32_t>(i % 2);
    auto row = features.row(i);
    for (auto& x : row) x = rng.UniformOpen();
    row[0] += 4.0 * labels[i];
  }
  return Dataset(std::move(features), std::move(labels), 2);
}

}  // namespace deepforest
