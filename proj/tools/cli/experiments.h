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

#ifndef DEEPFOREST_TOOLS_CLI_EXPERIMENTS_H_
#define DEEPFOREST_TOOLS_CLI_EXPERIMENTS_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "deepforest/dataset.h"
#include "deepforest/gcforest.h"
#include "deepforest/synthetic.h"

namespace deepforest::cli {

// Published reference numbers, carried as table metadata only.
struct UciBenchmark {
  std::string name;  // file stem: <name>_train.csv, <name>_test.csv
  double reported_gcforest = 0.0;
  double reported_rf = 0.0;
};
const std::vector<UciBenchmark>& UciBenchmarks();

struct DataPair {
  Dataset train;
  Dataset test;  // labels mapped through the training label map
};

// Throws IoError with preparation instructions when a file is missing.
DataPair LoadUciPair(const std::string& data_dir, const std::string& name);

// Cascade-only model with n_trees per cascade forest, other settings default.
GcConfig UciConfig(std::size_t n_trees, uint64_t seed);

struct RunResult {
  double accuracy = 0.0;
  std::size_t levels = 0;
  std::vector<double> level_accuracy;
  double seconds = 0.0;
};

RunResult RunGcForest(const DataPair& data, const GcConfig& config);

// Plain bootstrap random forest with sqrt(d) candidates and unlimited depth.
// Trained in chunks of `chunk` trees, each chunk's class vectors folded into
// a running sum, so memory stays bounded. The result is the mean over all
// n_trees trees.
RunResult RunRandomForest(const DataPair& data, std::size_t n_trees, uint64_t seed,
                          std::size_t chunk = 100);

// Synthetic sequence task used by the scanning ablation: each class owns a
// motif planted at a random offset inside noise.
WindowSignalConfig AblationSignal();
DataPair AblationData(uint64_t seed, std::size_t n_train = 300, std::size_t n_test = 300);
// Same cascade for both arms; `scanning` adds two grains.
GcConfig AblationConfig(bool scanning, uint64_t seed);

// Estimating accuracy per level for one cross-validation mode on one split.
std::vector<double> CvModeTrace(const Dataset& train, CvMode mode, std::size_t n_trees,
                                uint64_t seed);

}  // namespace deepforest::cli

#endif  // DEEPFOREST_TOOLS_CLI_EXPERIMENTS_H_
