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

#include "experiments.h"

#include <chrono>
#include <filesystem>
#include <numeric>

#include "deepforest/error.h"
#include "deepforest/forest.h"
#include "deepforest/metrics.h"
#include "deepforest/rng.h"

namespace deepforest::cli {
namespace {

double SecondsSince(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::vector<std::size_t> AllRows(std::size_t n) {
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return rows;
}

}  // namespace

const std::vector<UciBenchmark>& UciBenchmarks() {
  static const std::vector<UciBenchmark> kAll = {
      {"letter", 0.9740, 0.9650},
      {"adult", 0.8640, 0.8549},
      {"yeast", 0.6345, 0.6166},
  };
  return kAll;
}

DataPair LoadUciPair(const std::string& data_dir, const std::string& name) {
  const auto path = [&](const char* part) {
    return (std::filesystem::path(data_dir) / (name + "_" + part + ".csv")).string();
  };
  for (const char* part : {"train", "test"}) {
    if (!std::filesystem::exists(path(part))) {
      throw IoError("missing " + path(part) +
                    "; build the UCI files with `python3 tools/data/prepare_uci_data.py --out " +
                    data_dir + "` or point --data-dir at a directory holding " + name +
                    "_train.csv and " + name + "_test.csv");
    }
  }
  CsvSchema schema;
  Dataset train = LoadCsv(path("train"), schema);
  Dataset test = LoadCsv(path("test"), schema, &train.label_map());
  return {std::move(train), std::move(test)};
}

GcConfig UciConfig(std::size_t n_trees, uint64_t seed) {
  GcConfig c;
  c.variant = Variant::kCascadeOnly;
  c.level = LevelConfig::Default(n_trees);
  c.seed = seed;
  return c;
}

RunResult RunGcForest(const DataPair& data, const GcConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  const GcModel model = Fit(data.train, config);
  RunResult r;
  r.accuracy = Accuracy(model.PredictBatch(data.test).labels, data.test.labels());
  r.levels = model.cascade().levels.size();
  r.level_accuracy = model.cascade().termination.level_accuracy;
  r.seconds = SecondsSince(start);
  return r;
}

RunResult RunRandomForest(const DataPair& data, std::size_t n_trees, uint64_t seed,
                          std::size_t chunk) {
  if (n_trees == 0 || chunk == 0) throw InvalidArgumentError("random forest needs trees");
  const auto start = std::chrono::steady_clock::now();
  const ColumnarData columns(data.train);
  const auto rows = AllRows(data.train.n_rows());
  const std::size_t k = data.train.n_classes();
  std::vector<double> sum(data.test.n_rows() * k, 0.0);
  std::size_t done = 0;
  for (uint64_t c = 0; done < n_trees; ++c) {
    ForestConfig cfg = ForestConfig::RandomForest(std::min(chunk, n_trees - done));
    cfg.seed = DeriveSeed(seed, c);
    const Forest f = Forest::Train(columns, rows, cfg);
    const FeatureMatrix v = f.ClassVectors(data.test.features());
    // Chunk means weighted by their tree counts give the mean over all trees.
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += v.values()[i] * cfg.n_trees;
    done += cfg.n_trees;
  }
  std::vector<uint32_t> predicted(data.test.n_rows());
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    predicted[i] = ArgMax(std::span<const double>(sum).subspan(i * k, k));
  }
  RunResult r;
  r.accuracy = Accuracy(predicted, data.test.labels());
  r.seconds = SecondsSince(start);
  return r;
}

WindowSignalConfig AblationSignal() {
  WindowSignalConfig c;
  c.length = 64;
  c.motif_length = 8;
  c.n_classes = 3;
  c.motif_amplitude = 2.0;
  c.noise = 1.0;
  c.seed = 2017;
  return c;
}

DataPair AblationData(uint64_t seed, std::size_t n_train, std::size_t n_test) {
  const WindowSignalConfig signal = AblationSignal();
  return {WindowSignalData(signal, n_train, DeriveSeed(seed, 1)),
          WindowSignalData(signal, n_test, DeriveSeed(seed, 2))};
}

GcConfig AblationConfig(bool scanning, uint64_t seed) {
  GcConfig c;
  c.seed = seed;
  c.level = LevelConfig::Default(50, 2, 2);
  if (!scanning) {
    c.variant = Variant::kCascadeOnly;
    return c;
  }
  c.variant = Variant::kGrainCycle;
  for (const std::size_t w : {8, 16}) {
    c.grains.push_back(GrainConfig::Default(WindowShape::Sequence(w), 30));
  }
  return c;
}

std::vector<double> CvModeTrace(const Dataset& train, CvMode mode, std::size_t n_trees,
                                uint64_t seed) {
  GcConfig c = UciConfig(n_trees, seed);
  c.level.cv_mode = mode;
  const GcModel m = Fit(train, c);
  return m.cascade().termination.level_accuracy;
}

}  // namespace deepforest::cli
