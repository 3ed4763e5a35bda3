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

#include "run_config.h"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "deepforest/error.h"

namespace deepforest::cli {
namespace {

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

struct Entry {
  std::string key;
  std::string value;
  std::size_t line;

  [[noreturn]] void Fail(const std::string& what) const {
    throw ParseError("config line " + std::to_string(line) + ": " + key + ": " + what);
  }

  std::size_t Size(std::size_t min = 0) const {
    std::size_t v = 0;
    const auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc() || p != value.data() + value.size()) Fail("expected an integer");
    if (v < min) Fail("must be >= " + std::to_string(min));
    return v;
  }
  uint64_t U64() const {
    uint64_t v = 0;
    const auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc() || p != value.data() + value.size()) Fail("expected an integer");
    return v;
  }
  double Real() const {
    double v = 0;
    const auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc() || p != value.data() + value.size()) Fail("expected a number");
    return v;
  }
  bool Bool() const {
    if (value == "true") return true;
    if (value == "false") return false;
    Fail("expected true or false");
  }
  template <typename T>
  T Choice(const std::map<std::string, T>& options) const {
    const auto it = options.find(value);
    if (it != options.end()) return it->second;
    std::string names;
    for (const auto& [name, v] : options) names += (names.empty() ? "" : ", ") + name;
    Fail("expected one of " + names);
  }
};

std::size_t ParseDim(const Entry& e, std::string_view s) {
  std::size_t v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || v == 0) {
    e.Fail("bad size '" + std::string(s) + "'");
  }
  return v;
}

// "HxW" or a plain length.
WindowShape ParseShape(const Entry& e, std::string_view s) {
  s = Trim(s);
  const auto x = s.find('x');
  if (x == std::string_view::npos) return WindowShape::Sequence(ParseDim(e, s));
  return WindowShape::Panel(ParseDim(e, s.substr(0, x)), ParseDim(e, s.substr(x + 1)));
}

std::string Resolve(const std::string& base, const std::string& path) {
  if (base.empty() || path.empty() || std::filesystem::path(path).is_absolute()) return path;
  return (std::filesystem::path(base) / path).lexically_normal().string();
}

}  // namespace

std::string VariantName(Variant v) {
  switch (v) {
    case Variant::kGrainCycle: return "grain-cycle";
    case Variant::kConcatenated: return "concatenated";
    case Variant::kCascadeOnly: return "cascade-only";
  }
  return "?";
}

RunConfig ParseRunConfig(std::string_view text, const std::string& base_dir) {
  RunConfig c;
  std::size_t trees = 500, n_crt = 4, n_rf = 4;
  std::size_t k_folds = 3;
  CvMode cv_mode = CvMode::kOutOfFold;

  using Setter = std::function<void(const Entry&)>;
  const std::map<std::string, Setter> setters = {
      {"train", [&](const Entry& e) { c.train_path = Resolve(base_dir, e.value); }},
      {"test", [&](const Entry& e) { c.test_path = Resolve(base_dir, e.value); }},
      {"label_column", [&](const Entry& e) { c.label_column = e.value; }},
      {"panel",
       [&](const Entry& e) {
         const WindowShape s = ParseShape(e, e.value);
         if (!s.is_panel()) e.Fail("expected HxW");
         c.panel = PanelShape{s.height, s.width};
       }},
      {"variant",
       [&](const Entry& e) {
         c.model.variant = e.Choice<Variant>({{"grain-cycle", Variant::kGrainCycle},
                                              {"concatenated", Variant::kConcatenated},
                                              {"cascade-only", Variant::kCascadeOnly}});
       }},
      {"windows",
       [&](const Entry& e) {
         c.windows.clear();
         c.auto_windows = e.value == "auto";
         if (c.auto_windows) return;
         std::string_view rest = e.value;
         while (!rest.empty()) {
           const auto comma = rest.find(',');
           c.windows.push_back(ParseShape(e, rest.substr(0, comma)));
           if (comma == std::string_view::npos) break;
           rest.remove_prefix(comma + 1);
         }
       }},
      {"stride", [&](const Entry& e) { c.stride = e.Size(1); }},
      {"subsample",
       [&](const Entry& e) {
         if (e.value == "none") {
           c.subsample.reset();
           return;
         }
         const double r = e.Real();
         if (!(r > 0.0 && r <= 1.0)) e.Fail("must lie in (0, 1]");
         c.subsample = r;
       }},
      {"scan_trees", [&](const Entry& e) { c.scan_trees = e.Size(1); }},
      {"oof_scanning", [&](const Entry& e) { c.model.oof_scanning = e.Bool(); }},
      {"scanning_folds", [&](const Entry& e) { c.model.scanning_folds = e.Size(2); }},
      {"trees", [&](const Entry& e) { trees = e.Size(1); }},
      {"crt_forests", [&](const Entry& e) { n_crt = e.Size(); }},
      {"rf_forests", [&](const Entry& e) { n_rf = e.Size(); }},
      {"k_folds", [&](const Entry& e) { k_folds = e.Size(2); }},
      {"cv_mode",
       [&](const Entry& e) {
         cv_mode = e.Choice<CvMode>(
             {{"out-of-fold", CvMode::kOutOfFold}, {"in-fold-average", CvMode::kInFoldAverage}});
       }},
      {"criterion",
       [&](const Entry& e) {
         c.model.termination.criterion = e.Choice<TerminationCriterion>(
             {{"estimating-accuracy", TerminationCriterion::kEstimatingAccuracy},
              {"training-accuracy", TerminationCriterion::kTrainingAccuracy}});
       }},
      {"tolerance", [&](const Entry& e) { c.model.termination.tolerance = e.Real(); }},
      {"patience", [&](const Entry& e) { c.model.termination.patience = e.Size(1); }},
      {"max_levels", [&](const Entry& e) { c.model.termination.max_levels = e.Size(1); }},
      {"growing_fraction",
       [&](const Entry& e) {
         const double f = e.Real();
         if (!(f > 0.0 && f < 1.0)) e.Fail("must lie in (0, 1)");
         c.model.termination.growing_fraction = f;
       }},
      {"seed", [&](const Entry& e) { c.model.seed = e.U64(); }},
      {"model", [&](const Entry& e) { c.model_path = e.value; }},
      {"report", [&](const Entry& e) { c.report_path = e.value; }},
      {"probe", [&](const Entry& e) { c.probe_path = e.value; }},
      {"probe_rows", [&](const Entry& e) { c.probe_rows = e.Size(); }},
  };

  std::map<std::string, std::size_t> seen;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    Entry e{std::string(Trim(line.substr(0, eq))), std::string(Trim(line.substr(eq + 1))),
            line_no};
    const auto it = setters.find(e.key);
    if (it == setters.end()) {
      throw ParseError("config line " + std::to_string(line_no) + ": unknown key '" + e.key +
                       "'");
    }
    if (const auto [prev, fresh] = seen.emplace(e.key, line_no); !fresh) {
      e.Fail("duplicate key (first set on line " + std::to_string(prev->second) + ")");
    }
    if (e.value.empty()) e.Fail("missing value");
    it->second(e);
  }

  if (n_crt + n_rf == 0) throw ParseError("config: crt_forests + rf_forests must be >= 1");
  c.model.level = LevelConfig::Default(trees, n_crt, n_rf);
  c.model.level.k_folds = k_folds;
  c.model.level.cv_mode = cv_mode;
  return c;
}

RunConfig LoadRunConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return ParseRunConfig(buf.str(), std::filesystem::path(path).parent_path().string());
}

void ResolveGrains(RunConfig& config, std::size_t n_features) {
  GcConfig& m = config.model;
  m.grains.clear();
  if (m.variant == Variant::kCascadeOnly) return;
  if (config.auto_windows) {
    m.grains = DefaultGrains(n_features, config.panel, config.scan_trees);
  } else {
    for (const auto& w : config.windows) {
      if (w.is_panel() != config.panel.has_value()) {
        throw InvalidArgumentError(w.is_panel() ? "panel window given for sequence data"
                                                : "sequence window given for panel data");
      }
      m.grains.push_back(GrainConfig::Default(w, config.scan_trees));
    }
  }
  for (auto& g : m.grains) {
    g.stride = config.stride;
    g.subsample = config.subsample;
  }
}

}  // namespace deepforest::cli
