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

#ifndef DEEPFOREST_TOOLS_CLI_RUN_CONFIG_H_
#define DEEPFOREST_TOOLS_CLI_RUN_CONFIG_H_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include "deepforest/dataset.h"
#include "deepforest/gcforest.h"

namespace deepforest::cli {

// One experiment: where the data lives, how to build the model, where the
// artifacts go. Parsed from a flat `key = value` file; see configs/.
struct RunConfig {
  std::string train_path;
  std::string test_path;  // optional held-out set evaluated after training
  std::string label_column;
  std::optional<PanelShape> panel;

  GcConfig model;
  // Grain geometry, resolved against the data width at train time.
  bool auto_windows = true;
  std::vector<WindowShape> windows;
  std::size_t stride = 1;
  std::optional<double> subsample;
  std::size_t scan_trees = 500;

  std::string model_path = "model.gcf";
  std::string report_path;  // empty: no JSON file
  std::string probe_path;   // empty: <model_path>.probe.csv
  std::size_t probe_rows = 100;
};

// Throws ParseError naming the line (and the key, for unknown or malformed
// entries). Relative data and output paths are resolved against base_dir.
RunConfig ParseRunConfig(std::string_view text, const std::string& base_dir = "");
RunConfig LoadRunConfig(const std::string& path);

// Fills config.model.grains from the window settings and the data shape.
void ResolveGrains(RunConfig& config, std::size_t n_features);

std::string VariantName(Variant v);

}  // namespace deepforest::cli

#endif  // DEEPFOREST_TOOLS_CLI_RUN_CONFIG_H_
