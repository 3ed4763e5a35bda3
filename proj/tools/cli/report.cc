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

#include "report.h"

#include <fstream>
#include <iomanip>

#include "deepforest/error.h"

namespace deepforest::cli {

Evaluation Evaluation::From(const std::string& dataset, std::span<const uint32_t> predicted,
                            std::span<const uint32_t> truth, std::size_t n_classes) {
  const ConfusionMatrix cm(predicted, truth, n_classes);
  Evaluation e;
  e.dataset = dataset;
  e.rows = truth.size();
  e.accuracy = cm.accuracy();
  e.macro_f1 = cm.MacroF1();
  e.confusion = cm.rows();
  return e;
}

nlohmann::json ToJson(const EvalReport& r) {
  using nlohmann::json;
  json j;
  j["schema_version"] = kReportSchemaVersion;
  j["command"] = r.command;
  j["model"] = r.model_path;
  j["variant"] = r.variant;
  j["seed"] = r.seed;
  j["class_names"] = r.class_names;
  if (r.termination) {
    const auto& t = *r.termination;
    j["termination"] = {
        {"criterion", t.criterion == TerminationCriterion::kEstimatingAccuracy
                          ? "estimating-accuracy"
                          : "training-accuracy"},
        {"level_accuracy", t.level_accuracy},
        {"grown_levels", t.grown_levels()},
        {"chosen_levels", t.chosen_levels},
    };
  }
  const auto timings = [](const std::vector<LevelTiming>& levels) {
    json out = json::array();
    for (const auto& l : levels) {
      json e = {{"level", l.level + 1}, {"seconds", l.seconds}};
      if (l.estimating_accuracy) e["accuracy"] = *l.estimating_accuracy;
      out.push_back(e);
    }
    return out;
  };
  j["growing_levels"] = timings(r.growing);
  j["final_levels"] = timings(r.final_levels);
  j["evaluations"] = json::array();
  for (const auto& e : r.evaluations) {
    j["evaluations"].push_back({{"dataset", e.dataset},
                                {"rows", e.rows},
                                {"accuracy", e.accuracy},
                                {"macro_f1", e.macro_f1},
                                {"confusion", e.confusion}});
  }
  return j;
}

void WriteJson(const nlohmann::json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write to " + path + " failed");
}

void PrintReport(const EvalReport& r, std::ostream& out) {
  const auto flags = out.flags();
  out << std::fixed;
  out << "command: " << r.command << '\n';
  if (!r.model_path.empty()) out << "model: " << r.model_path << '\n';
  if (!r.variant.empty()) out << "variant: " << r.variant << "\nseed: " << r.seed << '\n';
  for (const auto& l : r.growing) {
    out << "growing level " << l.level + 1;
    if (l.estimating_accuracy) {
      out << "  accuracy " << std::setprecision(4) << *l.estimating_accuracy;
    }
    out << "  " << std::setprecision(1) << l.seconds << " s\n";
  }
  if (r.termination) {
    out << "levels: grown " << r.termination->grown_levels() << ", kept "
        << r.termination->chosen_levels << '\n';
  }
  for (const auto& l : r.final_levels) {
    out << "final level " << l.level + 1 << "  " << std::setprecision(1) << l.seconds << " s\n";
  }
  for (const auto& e : r.evaluations) {
    out << "evaluation: " << e.dataset << " (" << e.rows << " rows)\n"
        << "  accuracy " << std::setprecision(4) << e.accuracy << "  macro-F1 " << e.macro_f1
        << '\n'
        << "  confusion (rows true, columns predicted):\n";
    for (std::size_t t = 0; t < e.confusion.size(); ++t) {
      out << "    " << std::setw(12) << std::left
          << (t < r.class_names.size() ? r.class_names[t] : std::to_string(t)) << std::right;
      for (const auto v : e.confusion[t]) out << ' ' << std::setw(6) << v;
      out << '\n';
    }
  }
  out.flags(flags);
}

}  // namespace deepforest::cli
