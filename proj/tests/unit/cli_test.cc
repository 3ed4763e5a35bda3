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

#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "commands.h"
#include "deepforest/error.h"
#include "deepforest/model_io.h"
#include "deepforest/rng.h"
#include "json.hpp"
#include "run_config.h"

namespace deepforest::cli {
namespace {

namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::path(::testing::TempDir()) /
            ("gcforest_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string operator/(const std::string& name) const { return (path_ / name).string(); }
  std::string str() const { return path_.string(); }

 private:
  fs::path path_;
};

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

void WriteFile(const std::string& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

// Two noisy classes separated along the first two of six features.
std::string ToyCsv(std::size_t n, uint64_t seed) {
  Rng rng(seed);
  std::ostringstream s;
  s << "a,b,c,d,e,f,label\n";
  for (std::size_t i = 0; i < n; ++i) {
    const bool yes = i % 2 == 0;
    for (int j = 0; j < 6; ++j) s << rng.UniformOpen() + (j < 2 && yes ? 0.7 : 0.0) << ',';
    s << (yes ? "yes" : "no") << '\n';
  }
  return s.str();
}

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result Cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = RunCli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string SmallConfig(const TempDir& dir, const std::string& extra = "") {
  WriteFile(dir / "train.csv", ToyCsv(80, 1));
  WriteFile(dir / "test.csv", ToyCsv(40, 2));
  return "# toy run\n"
         "train = train.csv\n"
         "test = test.csv   # held out\n"
         "variant = cascade-only\n"
         "trees = 8\n"
         "crt_forests = 1\n"
         "rf_forests = 1\n"
         "max_levels = 3\n"
         "seed = 5\n" +
         extra;
}

TEST(RunConfigTest, DefaultsMatchLibraryDefaults) {
  const RunConfig c = ParseRunConfig("");
  EXPECT_EQ(c.model.variant, Variant::kGrainCycle);
  EXPECT_TRUE(c.auto_windows);
  EXPECT_EQ(c.scan_trees, 500u);
  EXPECT_EQ(c.stride, 1u);
  EXPECT_FALSE(c.subsample.has_value());
  EXPECT_TRUE(c.model.level == LevelConfig::Default());
  EXPECT_TRUE(c.model.termination == TerminationConfig{});
  EXPECT_EQ(c.model.seed, 0u);
  EXPECT_FALSE(c.model.oof_scanning);
}

TEST(RunConfigTest, ParsesTypedValues) {
  const RunConfig c = ParseRunConfig(
      "panel = 20x20\n"
      "windows = 10x10, 5x5\n"
      "variant = concatenated\n"
      "subsample = 0.5\n"
      "cv_mode = in-fold-average\n"
      "criterion = training-accuracy\n"
      "tolerance = 0.001\n"
      "patience = 2\n"
      "oof_scanning = true\n"
      "seed = 18446744073709551615\n"
      "train = data/x.csv\n",
      "/base");
  EXPECT_EQ(c.panel, (PanelShape{20, 20}));
  ASSERT_EQ(c.windows.size(), 2u);
  EXPECT_EQ(c.windows[1], WindowShape::Panel(5, 5));
  EXPECT_EQ(c.model.variant, Variant::kConcatenated);
  EXPECT_EQ(c.subsample, 0.5);
  EXPECT_EQ(c.model.level.cv_mode, CvMode::kInFoldAverage);
  EXPECT_EQ(c.model.termination.criterion, TerminationCriterion::kTrainingAccuracy);
  EXPECT_EQ(c.model.termination.tolerance, 0.001);
  EXPECT_EQ(c.model.termination.patience, 2u);
  EXPECT_TRUE(c.model.oof_scanning);
  EXPECT_EQ(c.model.seed, UINT64_MAX);
  EXPECT_EQ(c.train_path, "/base/data/x.csv");

  RunConfig resolved = c;
  ResolveGrains(resolved, 400);
  ASSERT_EQ(resolved.model.grains.size(), 2u);
  EXPECT_EQ(resolved.model.grains[0].subsample, 0.5);
}

TEST(RunConfigTest, ErrorsNameLineAndKey) {
  const auto message = [](const std::string& text) {
    try {
      ParseRunConfig(text);
    } catch (const ParseError& e) {
      return std::string(e.what());
    }
    return std::string("accepted");
  };
  const std::string unknown = message("# c\nseed = 1\nnum_trees = 5\n");
  EXPECT_NE(unknown.find("line 3"), std::string::npos) << unknown;
  EXPECT_NE(unknown.find("num_trees"), std::string::npos) << unknown;
  EXPECT_NE(message("trees = many").find("trees"), std::string::npos);
  EXPECT_NE(message("seed = 1\nseed = 2").find("duplicate"), std::string::npos);
  EXPECT_NE(message("variant = deep").find("grain-cycle"), std::string::npos);
  EXPECT_NE(message("just words").find("line 1"), std::string::npos);
  EXPECT_NE(message("k_folds = 1").find("k_folds"), std::string::npos);
  EXPECT_NE(message("growing_fraction = 1").find("growing_fraction"), std::string::npos);
  EXPECT_NE(message("panel = 20").find("HxW"), std::string::npos);
}

#ifdef DEEPFOREST_CONFIG_DIR
TEST(RunConfigTest, CommittedConfigsParse) {
  std::size_t n = 0;
  for (const auto& entry : fs::directory_iterator(DEEPFOREST_CONFIG_DIR)) {
    if (entry.path().extension() != ".cfg") continue;
    SCOPED_TRACE(entry.path().string());
    const RunConfig c = LoadRunConfig(entry.path().string());
    EXPECT_FALSE(c.train_path.empty());
    EXPECT_NO_THROW(c.model.Validate());
    ++n;
  }
  EXPECT_GE(n, 3u);
}
#endif

TEST(CliTest, TrainEvaluatePredictVerify) {
  TempDir dir;
  WriteFile(dir / "run.cfg", SmallConfig(dir, "report = " + (dir / "report.json") + "\n"));
  const std::string model = dir / "m.gcf";
  const Result train = Cli({"train", "--config", dir / "run.cfg", "--model", model});
  ASSERT_EQ(train.code, 0) << train.err;
  EXPECT_NE(train.out.find("accuracy"), std::string::npos);
  EXPECT_NE(train.err.find("growing level 1"), std::string::npos);

  const auto report = nlohmann::json::parse(ReadFile(dir / "report.json"));
  EXPECT_EQ(report["schema_version"], 1);
  EXPECT_EQ(report["command"], "train");
  const auto& t = report["termination"];
  EXPECT_EQ(t["level_accuracy"].size(), report["growing_levels"].size());
  EXPECT_EQ(report["final_levels"].size(), t["chosen_levels"].get<std::size_t>());
  ASSERT_EQ(report["evaluations"].size(), 1u);
  EXPECT_EQ(report["evaluations"][0]["rows"], 40);

  const Result verify = Cli({"verify", "--model", model});
  EXPECT_EQ(verify.code, 0) << verify.out << verify.err;
  EXPECT_NE(verify.out.find("mismatched rows: 0"), std::string::npos);

  const Result eval = Cli({"evaluate", "--model", model, "--test", dir / "test.csv", "--report",
                           dir / "eval.json"});
  ASSERT_EQ(eval.code, 0) << eval.err;
  const auto ej = nlohmann::json::parse(ReadFile(dir / "eval.json"))["evaluations"][0];
  uint64_t trace = 0, total = 0;
  for (std::size_t i = 0; i < ej["confusion"].size(); ++i) {
    for (std::size_t j = 0; j < ej["confusion"][i].size(); ++j) {
      total += ej["confusion"][i][j].get<uint64_t>();
      if (i == j) trace += ej["confusion"][i][j].get<uint64_t>();
    }
  }
  EXPECT_EQ(total, 40u);
  EXPECT_DOUBLE_EQ(ej["accuracy"].get<double>(), static_cast<double>(trace) / total);
  EXPECT_EQ(ej["accuracy"], report["evaluations"][0]["accuracy"]);

  const Result pred = Cli({"predict", "--model", model, "--input", dir / "test.csv",
                           "--output", dir / "pred.csv"});
  ASSERT_EQ(pred.code, 0) << pred.err;
  std::istringstream lines(ReadFile(dir / "pred.csv"));
  std::string header, line;
  std::getline(lines, header);
  EXPECT_EQ(header, "label,p_yes,p_no");
  std::size_t n = 0;
  while (std::getline(lines, line)) {
    EXPECT_TRUE(line.rfind("yes,", 0) == 0 || line.rfind("no,", 0) == 0) << line;
    ++n;
  }
  EXPECT_EQ(n, 40u);
}

TEST(CliTest, SameConfigGivesByteIdenticalModels) {
  TempDir dir;
  WriteFile(dir / "run.cfg", SmallConfig(dir));
  ASSERT_EQ(Cli({"train", "--config", dir / "run.cfg", "--model", dir / "a.gcf"}).code, 0);
  ASSERT_EQ(Cli({"--threads", "1", "train", "--config", dir / "run.cfg", "--model",
                 dir / "b.gcf"})
                .code,
            0);
  EXPECT_EQ(ReadFile(dir / "a.gcf"), ReadFile(dir / "b.gcf"));
  EXPECT_FALSE(ReadFile(dir / "a.gcf").empty());
}

TEST(CliTest, ConstantModelScoresHalfOnBalancedData) {
  TempDir dir;
  TreeBuilder b(2, 1);
  const uint32_t counts[] = {1, 0};
  b.AddLeaf(counts);
  ForestConfig fc = ForestConfig::RandomForest(1);
  std::vector<Forest> forests;
  forests.emplace_back(fc, std::vector<Tree>{b.Finish()}, 2, 1);
  CascadeModel cascade;
  cascade.levels.emplace_back(std::move(forests), 1, 2);
  cascade.source_widths = {1};
  cascade.n_classes = 2;
  cascade.termination.level_accuracy = {0.5};
  cascade.termination.chosen_levels = 1;
  GcConfig cfg;
  cfg.variant = Variant::kCascadeOnly;
  cfg.level.forests = {fc};
  SaveModel(GcModel(cfg, {}, cascade, LabelMap({"zero", "one"}), 1, std::nullopt, 2),
            dir / "const.gcf");
  WriteFile(dir / "t.csv", "x,y\n0.1,zero\n0.2,one\n0.3,zero\n0.4,one\n");

  const Result r = Cli({"evaluate", "--model", dir / "const.gcf", "--test", dir / "t.csv",
                        "--report", dir / "r.json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto e = nlohmann::json::parse(ReadFile(dir / "r.json"))["evaluations"][0];
  EXPECT_EQ(e["accuracy"].get<double>(), 0.5);
  EXPECT_EQ(e["confusion"], nlohmann::json::parse("[[2,0],[2,0]]"));
}

TEST(CliTest, ErrorsGoToErrorStream) {
  TempDir dir;
  WriteFile(dir / "bad.cfg", "train = x.csv\nbogus = 1\n");
  const Result bad = Cli({"train", "--config", dir / "bad.cfg"});
  EXPECT_EQ(bad.code, 1);
  EXPECT_TRUE(bad.out.empty());
  EXPECT_NE(bad.err.find("bogus"), std::string::npos);
  EXPECT_NE(bad.err.find("line 2"), std::string::npos);

  const Result missing = Cli({"benchmark", "--suite", "uci-lowdim", "--data-dir", dir.str()});
  EXPECT_EQ(missing.code, 1);
  EXPECT_NE(missing.err.find("prepare_uci_data.py"), std::string::npos) << missing.err;

  const Result usage = Cli({"benchmark", "--suite", "nope"});
  EXPECT_EQ(usage.code, 2);
  EXPECT_FALSE(usage.err.empty());
  EXPECT_NE(Cli({}).code, 0);

  const Result corrupt = Cli({"evaluate", "--model", dir / "bad.cfg", "--test", dir / "bad.cfg"});
  EXPECT_EQ(corrupt.code, 1);
  EXPECT_NE(corrupt.err.find("magic"), std::string::npos);
}

TEST(CliTest, WrongWidthIsRejected) {
  TempDir dir;
  WriteFile(dir / "run.cfg", SmallConfig(dir));
  ASSERT_EQ(Cli({"train", "--config", dir / "run.cfg", "--model", dir / "m.gcf"}).code, 0);
  WriteFile(dir / "narrow.csv", "a,b\n1,2\n");
  const Result r = Cli({"predict", "--model", dir / "m.gcf", "--input", dir / "narrow.csv",
                        "--output", "-"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("expects 6 features"), std::string::npos) << r.err;
}

#ifdef GCFOREST_BINARY
int Shell(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(CliBinaryTest, ExitCodesAndStreams) {
  TempDir dir;
  WriteFile(dir / "run.cfg", SmallConfig(dir));
  const std::string bin = GCFOREST_BINARY;
  const std::string redirect = " >" + (dir / "out.txt") + " 2>" + (dir / "err.txt");
  EXPECT_EQ(Shell(bin + " train --config " + (dir / "run.cfg") + " --model " + (dir / "m.gcf") +
                  redirect),
            0);
  EXPECT_NE(ReadFile(dir / "out.txt").find("levels:"), std::string::npos);
  // Progress lines ("growing level N: accuracy ...") stay on stderr.
  EXPECT_EQ(ReadFile(dir / "out.txt").find(": accuracy"), std::string::npos);
  EXPECT_NE(ReadFile(dir / "err.txt").find(": accuracy"), std::string::npos);

  EXPECT_EQ(Shell(bin + " evaluate --model " + (dir / "missing.gcf") + " --test x.csv" +
                  redirect),
            1);
  EXPECT_TRUE(ReadFile(dir / "out.txt").empty());
  EXPECT_NE(ReadFile(dir / "err.txt").find("error:"), std::string::npos);

  EXPECT_EQ(Shell("GCFOREST_THREADS=1 " + bin + " train --config " + (dir / "run.cfg") +
                  " --model " + (dir / "m1.gcf") + redirect),
            0);
  EXPECT_EQ(ReadFile(dir / "m.gcf"), ReadFile(dir / "m1.gcf"));
}
#endif

}  // namespace
}  // namespace deepforest::cli
