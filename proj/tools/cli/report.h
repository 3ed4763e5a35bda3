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

#ifndef DEEPFOREST_TOOLS_CLI_REPORT_H_
#define DEEPFOREST_TOOLS_CLI_REPORT_H_

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "deepforest/cascade.h"
#include "deepforest/metrics.h"
#include "json.hpp"

namespace deepforest::cli {

// Bumped whenever a field changes meaning or disappears.
inline constexpr int kReportSchemaVersion = 1;

struct Evaluation {
  std::string dataset;  // path or suite label
  std::size_t rows = 0;
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  std::vector<std::vector<uint64_t>> confusion;  // rows true, columns predicted

  static Evaluation From(const std::string& dataset, std::span<const uint32_t> predicted,
                         std::span<const uint32_t> truth, std::size_t n_classes);
};

struct LevelTiming {
  std::size_t level = 0;
  std::optional<double> estimating_accuracy;  // growing phase only
  double seconds = 0.0;
};

struct EvalReport {
  std::string command;
  std::string model_path;
  std::string variant;
  uint64_t seed = 0;
  std::vector<std::string> class_names;
  std::optional<TerminationRecord> termination;
  std::vector<LevelTiming> growing;
  std::vector<LevelTiming> final_levels;
  std::vector<Evaluation> evaluations;
};

nlohmann::json ToJson(const EvalReport& report);
void WriteJson(const nlohmann::json& j, const std::string& path);
void PrintReport(const EvalReport& report, std::ostream& out);

}  // namespace deepforest::cli

#endif  // DEEPFOREST_TOOLS_CLI_REPORT_H_
