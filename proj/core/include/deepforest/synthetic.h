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

#ifndef DEEPFOREST_SYNTHETIC_H_
#define DEEPFOREST_SYNTHETIC_H_

#include <cstddef>
#include <cstdint>

#include "deepforest/dataset.h"

namespace deepforest {

// Sequences whose class is carried only by a short motif at a random
// position. Every class motif is a permutation of the same value set, so
// single features have (almost) class-independent marginals and the signal
// is local in the window sense.
struct WindowSignalConfig {
  std::size_t length = 64;
  std::size_t motif_length = 8;
  std::size_t n_classes = 3;
  double motif_amplitude = 2.0;  // motif values span [-a, a]
  double noise = 1.0;            // background and additive noise std dev
  uint64_t seed = 0;             // fixes the motifs
};

// n examples, labels i mod n_classes, then rows shuffled. Motifs depend on
// config.seed only, so train and test sets built with different
// sample_seed values share the task.
Dataset WindowSignalData(const WindowSignalConfig& config, std::size_t n, uint64_t sample_seed);

// Two classes separated by a wide margin on feature 0; the remaining
// features are uniform noise. Any level reaches accuracy 1.
Dataset SeparableData(std::size_t n, std::size_t n_features, uint64_t seed);

}  // namespace deepforest

#endif  // DEEPFOREST_SYNTHETIC_H_
