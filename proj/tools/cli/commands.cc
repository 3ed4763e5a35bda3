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

#include "commands.h"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "deepforest/error.h"
#include "deepforest/gcforest.h"
#include "deepforest/metrics.h"
#include "deepforest/model_io.h"
#include "deepforest/parallel.h"
#include "experiments.h"
#include "report.h"
#include "run_config.h"

namespace deepforest::cli {
namespace {

constexpr int kRuntimeError = 1;
constexpr int kUsageError = 2;
constexpr int kVerifyMismatch = 3;

struct Io {
  std::ostream& out;
  std::ostream& err;
};

std::string CsvField(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string q = "\"";
  for (const char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

std::string ShortestDouble(double v) {
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

// Rows of a prediction input: either exactly the model's features, or the
// features plus one label column that is ignored.
FeatureMatrix LoadInputs(const std::string& path, const GcModel& model,
                         const std::string& label_column) {
  CsvSchema labeled;
  labeled.label_column = label_column;
  CsvSchema plain;
  plain.unlabeled = true;
  Dataset ds;
  try {
    ds = LoadCsv(path, plain);
  } catch (const ParseError&) {
    // Non-numeric cell: most likely the label column.
    ds = LoadCsv(path, labeled);
  }
  if (ds.n_features() == model.raw_dim() + 1) ds = LoadCsv(path, labeled);
  if (ds.n_features() != model.raw_dim()) {
    throw DimensionMismatchError(path + ": model expects " + std::to_string(model.raw_dim()) +
                                 " features, file has " + std::to_string(ds.n_features()));
  }
  return ds.features();
}

Dataset LoadLabeled(const std::string& path, const std::string& label_column,
                    const std::optional<PanelShape>& panel, const LabelMap* labels) {
  CsvSchema schema;
  schema.label_column = label_column;
  schema.panel_shape = panel;
  Dataset ds = LoadCsv(path, schema, labels);
  if (!ds.has_labels()) throw DataError(path + ": no label column");
  return ds;
}

FeatureMatrix FirstRows(const FeatureMatrix& x, std::size_t n) {
  n = std::min(n, x.rows());
  return FeatureMatrix(n, x.cols(),
                       std::vector<double>(x.values().begin(),
                                           x.values().begin() + static_cast<std::ptrdiff_t>(n * x.cols())));
}

// ---- train ----

struct TrainArgs {
  std::string config;
  std::string model;
  std::string report;
};

int Train(const TrainArgs& args, Io io) {
  RunConfig rc = LoadRunConfig(args.config);
  if (!args.model.empty()) rc.model_path = args.model;
  if (!args.report.empty()) rc.report_path = args.report;
  if (rc.train_path.empty()) throw ParseError(args.config + ": no `train` path given");

  const Dataset train = LoadLabeled(rc.train_path, rc.label_column, rc.panel, nullptr);
  ResolveGrains(rc, train.n_features());
  rc.model.Validate();

  EvalReport report;
  report.command = "train";
  report.model_path = rc.model_path;
  report.variant = VariantName(rc.model.variant);
  report.seed = rc.model.seed;
  report.class_names = train.label_map().names();

  io.err << "training on " << rc.train_path << ": " << train.n_rows() << " rows, "
         << train.n_features() << " features, " << train.n_classes() << " classes, "
         << rc.model.grains.size() << " grains\n";
  const auto observer = [&](const LevelEvent& e) {
    LevelTiming t{e.level, std::nullopt, e.seconds};
    if (e.phase == LevelEvent::Phase::kGrowing) {
      t.estimating_accuracy = e.accuracy;
      report.growing.push_back(t);
      io.err << "  growing level " << e.level + 1 << ": accuracy " << std::fixed
             << std::setprecision(4) << e.accuracy << " (" << std::setprecision(1) << e.seconds
             << " s)\n";
    } else {
      report.final_levels.push_back(t);
      io.err << "  final level " << e.level + 1 << " (" << std::fixed << std::setprecision(1)
             << e.seconds << " s)\n";
    }
    io.err.unsetf(std::ios::floatfield);
  };
  const GcModel model = Fit(train, rc.model, observer);
  report.termination = model.cascade().termination;

  SaveModel(model, rc.model_path);
  std::optional<Dataset> test;
  if (!rc.test_path.empty()) {
    test = LoadLabeled(rc.test_path, rc.label_column, rc.panel, &train.label_map());
    const Prediction p = model.PredictBatch(*test);
    report.evaluations.push_back(
        Evaluation::From(rc.test_path, p.labels, test->labels(), model.n_classes()));
  }
  const std::string probe =
      rc.probe_path.empty() ? rc.model_path + ".probe.csv" : rc.probe_path;
  if (rc.probe_rows > 0) {
    WriteProbeCsv(model, FirstRows(test ? test->features() : train.features(), rc.probe_rows),
                  probe);
  }

  PrintReport(report, io.out);
  if (!rc.report_path.empty()) WriteJson(ToJson(report), rc.report_path);
  return 0;
}

// ---- predict / evaluate / verify ----

struct PredictArgs {
  std::string model;
  std::string input;
  std::string output;
  std::string label_column;
};

int Predict(const PredictArgs& args, Io io) {
  const GcModel model = LoadModel(args.model);
  const FeatureMatrix x = LoadInputs(args.input, model, args.label_column);
  const Prediction p = model.PredictBatch(x);

  std::ofstream file;
  if (args.output != "-") {
    file.open(args.output);
    if (!file) throw IoError("cannot open " + args.output + " for writing");
  }
  std::ostream& out = args.output == "-" ? io.out : file;
  const auto& names = model.labels().names();
  const auto name = [&](std::size_t c) {
    return c < names.size() ? names[c] : std::to_string(c);
  };
  out << "label";
  for (std::size_t c = 0; c < model.n_classes(); ++c) out << ',' << CsvField("p_" + name(c));
  out << '\n';
  for (std::size_t i = 0; i < x.rows(); ++i) {
    out << CsvField(name(p.labels[i]));
    for (const double v : p.aggregated.row(i)) out << ',' << ShortestDouble(v);
    out << '\n';
  }
  if (!out) throw IoError("write to " + args.output + " failed");
  if (args.output != "-") io.err << "wrote " << x.rows() << " predictions to " << args.output << '\n';
  return 0;
}

struct EvaluateArgs {
  std::string model;
  std::string test;
  std::string label_column;
  std::string report;
};

int Evaluate(const EvaluateArgs& args, Io io) {
  const GcModel model = LoadModel(args.model);
  const Dataset test = LoadLabeled(args.test, args.label_column, model.panel(), &model.labels());
  if (test.n_features() != model.raw_dim()) {
    throw DimensionMismatchError(args.test + ": model expects " +
                                 std::to_string(model.raw_dim()) + " features, file has " +
                                 std::to_string(test.n_features()));
  }
  const Prediction p = model.PredictBatch(test);
  EvalReport report;
  report.command = "evaluate";
  report.model_path = args.model;
  report.variant = VariantName(model.config().variant);
  report.seed = model.config().seed;
  report.class_names = model.labels().names();
  report.termination = model.cascade().termination;
  report.evaluations.push_back(
      Evaluation::From(args.test, p.labels, test.labels(), model.n_classes()));
  PrintReport(report, io.out);
  if (!args.report.empty()) WriteJson(ToJson(report), args.report);
  return 0;
}

struct VerifyArgs {
  std::string model;
  std::string probe;
};

int Verify(const VerifyArgs& args, Io io) {
  const GcModel model = LoadModel(args.model);
  const std::string probe = args.probe.empty() ? args.model + ".probe.csv" : args.probe;
  const ProbeCheck check = VerifyProbeCsv(model, probe);
  io.out << "probe rows: " << check.rows << "\nmismatched rows: " << check.mismatched_rows
         << "\nmax abs diff: " << ShortestDouble(check.max_abs_diff) << '\n';
  return check.mismatched_rows == 0 ? 0 : kVerifyMismatch;
}

// ---- benchmark ----

struct BenchmarkArgs {
  std::string suite;
  std::string data_dir = "data/uci";
  std::vector<std::string> datasets;
  std::size_t seeds = 1;
  std::size_t trees = 500;
  std::size_t rf_trees = 2000;
  std::string report;
};

double Mean(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / v.size();
}

std::string Pct(double v) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(2) << 100.0 * v;
  return s.str();
}

int BenchUci(const BenchmarkArgs& args, Io io, nlohmann::json& j) {
  std::vector<UciBenchmark> chosen;
  for (const auto& b : UciBenchmarks()) {
    if (args.datasets.empty() ||
        std::find(args.datasets.begin(), args.datasets.end(), b.name) != args.datasets.end()) {
      chosen.push_back(b);
    }
  }
  if (chosen.empty()) throw InvalidArgumentError("no known dataset selected");
  io.out << "dataset  gcforest%  rf%     reported gcforest%  reported rf%  levels  seconds\n";
  for (const auto& b : chosen) {
    const DataPair data = LoadUciPair(args.data_dir, b.name);
    std::vector<double> gc, rf, levels;
    double seconds = 0;
    for (std::size_t s = 0; s < args.seeds; ++s) {
      io.err << b.name << " seed " << s << ": gcforest\n";
      const RunResult g = RunGcForest(data, UciConfig(args.trees, s));
      io.err << b.name << " seed " << s << ": random forest\n";
      const RunResult r = RunRandomForest(data, args.rf_trees, s);
      gc.push_back(g.accuracy);
      rf.push_back(r.accuracy);
      levels.push_back(static_cast<double>(g.levels));
      seconds += g.seconds + r.seconds;
    }
    io.out << std::left << std::setw(9) << b.name << std::setw(11) << Pct(Mean(gc))
           << std::setw(8) << Pct(Mean(rf)) << std::setw(20) << Pct(b.reported_gcforest)
           << std::setw(14) << Pct(b.reported_rf) << std::setw(8) << Mean(levels)
           << std::fixed << std::setprecision(0) << seconds << std::right << '\n';
    io.out.unsetf(std::ios::floatfield);
    j["rows"].push_back({{"dataset", b.name},
                         {"gcforest_accuracy", gc},
                         {"rf_accuracy", rf},
                         {"reported_gcforest", b.reported_gcforest},
                         {"reported_rf", b.reported_rf},
                         {"seconds", seconds}});
  }
  return 0;
}

int BenchAblation(const BenchmarkArgs& args, Io io, nlohmann::json& j) {
  std::vector<double> full, cascade_only, rf;
  for (std::size_t s = 0; s < args.seeds; ++s) {
    const DataPair data = AblationData(s);
    io.err << "seed " << s << ": gcforest\n";
    full.push_back(RunGcForest(data, AblationConfig(true, s)).accuracy);
    io.err << "seed " << s << ": cascade only\n";
    cascade_only.push_back(RunGcForest(data, AblationConfig(false, s)).accuracy);
    rf.push_back(RunRandomForest(data, args.rf_trees, s).accuracy);
  }
  io.out << "model          accuracy%  (synthetic window-signal data, " << args.seeds
         << " seeds)\n"
         << "gcforest       " << Pct(Mean(full)) << "\ncascade-only   " << Pct(Mean(cascade_only))
         << "\nrandom forest  " << Pct(Mean(rf)) << '\n'
         << "reported reference (sEMG): gcforest 71.30, cascade-only 48.15\n";
  j["rows"] = {{{"model", "gcforest"}, {"accuracy", full}},
               {{"model", "cascade-only"}, {"accuracy", cascade_only}},
               {{"model", "random-forest"}, {"accuracy", rf}}};
  return 0;
}

int BenchCvMode(const BenchmarkArgs& args, Io io, nlohmann::json& j) {
  const DataPair data = LoadUciPair(args.data_dir, "yeast");
  for (std::size_t s = 0; s < args.seeds; ++s) {
    const auto oof = CvModeTrace(data.train, CvMode::kOutOfFold, args.trees, s);
    const auto avg = CvModeTrace(data.train, CvMode::kInFoldAverage, args.trees, s);
    io.out << "seed " << s << "  level  out-of-fold%  in-fold-average%\n";
    for (std::size_t l = 0; l < std::max(oof.size(), avg.size()); ++l) {
      io.out << "        " << std::setw(5) << l + 1 << "  " << std::setw(12)
             << (l < oof.size() ? Pct(oof[l]) : "-") << "  " << std::setw(16)
             << (l < avg.size() ? Pct(avg[l]) : "-") << '\n';
    }
    j["rows"].push_back({{"seed", s}, {"out_of_fold", oof}, {"in_fold_average", avg}});
  }
  return 0;
}

int Benchmark(const BenchmarkArgs& args, Io io) {
  nlohmann::json j;
  j["schema_version"] = kReportSchemaVersion;
  j["command"] = "benchmark";
  j["suite"] = args.suite;
  j["seeds"] = args.seeds;
  j["rows"] = nlohmann::json::array();
  int rc = 0;
  if (args.suite == "uci-lowdim") {
    rc = BenchUci(args, io, j);
  } else if (args.suite == "scanning-ablation") {
    rc = BenchAblation(args, io, j);
  } else {
    rc = BenchCvMode(args, io, j);
  }
  if (!args.report.empty()) WriteJson(j, args.report);
  return rc;
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Train and apply deep forest models", "gcforest"};
  app.require_subcommand(1);
  std::optional<std::size_t> threads;
  app.add_option("--threads", threads,
                 "Worker thread cap (default: GCFOREST_THREADS or all cores)")
      ->check(CLI::PositiveNumber);

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Fit a model from a run config");
  train_cmd->add_option("--config", train.config, "Run config file")->required();
  train_cmd->add_option("--model", train.model, "Override the model output path");
  train_cmd->add_option("--report", train.report, "Override the JSON report path");

  PredictArgs predict;
  auto* predict_cmd = app.add_subcommand("predict", "Write predicted labels and class vectors");
  predict_cmd->add_option("--model", predict.model)->required();
  predict_cmd->add_option("--input", predict.input, "CSV with a header row")->required();
  predict_cmd->add_option("--output", predict.output, "Output CSV, - for stdout")->required();
  predict_cmd->add_option("--label-column", predict.label_column,
                          "Label column to ignore when present (default: last)");

  EvaluateArgs evaluate;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Accuracy and confusion on a test CSV");
  evaluate_cmd->add_option("--model", evaluate.model)->required();
  evaluate_cmd->add_option("--test", evaluate.test)->required();
  evaluate_cmd->add_option("--label-column", evaluate.label_column);
  evaluate_cmd->add_option("--report", evaluate.report, "JSON report path");

  VerifyArgs verify;
  auto* verify_cmd =
      app.add_subcommand("verify", "Check a model against its probe file bit for bit");
  verify_cmd->add_option("--model", verify.model)->required();
  verify_cmd->add_option("--probe", verify.probe, "Probe CSV (default: <model>.probe.csv)");

  BenchmarkArgs bench;
  auto* bench_cmd = app.add_subcommand("benchmark", "Run a comparison suite");
  bench_cmd->add_option("--suite", bench.suite)
      ->required()
      ->check(CLI::IsMember({"uci-lowdim", "scanning-ablation", "cv-mode-compare"}));
  bench_cmd->add_option("--data-dir", bench.data_dir, "Directory of the UCI CSV files");
  bench_cmd->add_option("--datasets", bench.datasets, "Subset of letter, adult, yeast")
      ->delimiter(',');
  bench_cmd->add_option("--seeds", bench.seeds, "Repetitions with derived seeds")
      ->check(CLI::PositiveNumber);
  bench_cmd->add_option("--trees", bench.trees, "Trees per cascade forest")
      ->check(CLI::PositiveNumber);
  bench_cmd->add_option("--rf-trees", bench.rf_trees, "Trees in the random-forest baseline")
      ->check(CLI::PositiveNumber);
  bench_cmd->add_option("--report", bench.report, "JSON report path");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    // --help exits 0; every real parse failure maps to one usage code.
    return app.exit(e, out, err) == 0 ? 0 : kUsageError;
  }

  struct ThreadCapScope {
    explicit ThreadCapScope(std::optional<std::size_t> n) {
      if (n) SetThreadCap(*n);
    }
    ~ThreadCapScope() { SetThreadCap(0); }
  } cap(threads);
  const Io io{out, err};
  try {
    if (*train_cmd) return Train(train, io);
    if (*predict_cmd) return Predict(predict, io);
    if (*evaluate_cmd) return Evaluate(evaluate, io);
    if (*verify_cmd) return Verify(verify, io);
    return Benchmark(bench, io);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
}

}  // namespace deepforest::cli
