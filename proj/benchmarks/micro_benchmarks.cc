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

#include <benchmark/benchmark.h>

#include <numeric>
#include <vector>

#include "deepforest/forest.h"
#include "deepforest/gcforest.h"
#include "deepforest/model_io.h"
#include "deepforest/scanning.h"
#include "deepforest/synthetic.h"
#include "deepforest/tree.h"

namespace deepforest {
namespace {

std::vector<std::size_t> AllRows(std::size_t n) {
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return rows;
}

Dataset Signal(std::size_t n) { return WindowSignalData(WindowSignalConfig{}, n, 1); }

void BM_GrowTree(benchmark::State& state) {
  const Dataset ds = Signal(static_cast<std::size_t>(state.range(0)));
  const ColumnarData data(ds);
  const auto rows = AllRows(ds.n_rows());
  TreeConfig cfg;
  cfg.kind = state.range(1) ? TreeKind::kCompletelyRandom : TreeKind::kGiniSplit;
  for (auto _ : state) {
    cfg.seed++;
    benchmark::DoNotOptimize(Tree::Grow(data, rows, cfg));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GrowTree)->ArgsProduct({{256, 2048}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_ForestClassVectors(benchmark::State& state) {
  const Dataset ds = Signal(1024);
  const Forest f = Forest::Train(ds, AllRows(ds.n_rows()), ForestConfig::RandomForest(50));
  for (auto _ : state) benchmark::DoNotOptimize(f.ClassVectors(ds.features()));
  state.SetItemsProcessed(state.iterations() * ds.n_rows());
}
BENCHMARK(BM_ForestClassVectors)->Unit(benchmark::kMillisecond);

void BM_GrainTransform(benchmark::State& state) {
  const Dataset ds = Signal(200);
  const GrainTransformer g =
      FitGrain(ds, GrainConfig::Default(WindowShape::Sequence(8), 20), 3);
  for (auto _ : state) benchmark::DoNotOptimize(g.TransformBatch(ds.features()));
  state.SetItemsProcessed(state.iterations() * ds.n_rows());
}
BENCHMARK(BM_GrainTransform)->Unit(benchmark::kMillisecond);

void BM_SerializeRoundTrip(benchmark::State& state) {
  const Dataset ds = Signal(300);
  GcConfig cfg;
  cfg.variant = Variant::kCascadeOnly;
  cfg.level = LevelConfig::Default(50, 2, 2);
  cfg.termination.max_levels = 2;
  const GcModel m = Fit(ds, cfg);
  const auto size = static_cast<int64_t>(SerializeModel(m).size());
  for (auto _ : state) benchmark::DoNotOptimize(DeserializeModel(SerializeModel(m)));
  state.SetBytesProcessed(state.iterations() * size);
}
BENCHMARK(BM_SerializeRoundTrip)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace deepforest

BENCHMARK_MAIN();
