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

#include "deepforest/metrics.h"

#include <string>

#include "deepforest/error.h"

namespace deepforest {

double Accuracy(std::span<const uint32_t> predicted, std::span<const uint32_t> truth) {
  if (predicted.size() != truth.size()) {
    throw InvalidArgumentError("Accuracy: " + std::to_string(predicted.size()) +
                               " predictions for " + std::to_string(truth.size()) +
                               " labels");
  }
  if (truth.empty()) throw InvalidArgumentError("Accuracy: empty input");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hits += predicted[i] == truth[i];
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

ConfusionMatrix::ConfusionMatrix(std::span<const uint32_t> predicted,
                                 std::span<const uint32_t> truth, std::size_t n_classes)
    : n_classes_(n_classes), counts_(n_classes * n_classes, 0) {
  if (predicted.size() != truth.size()) {
    throw InvalidArgumentError("ConfusionMatrix: length mismatch");
  }
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] >= n_classes || predicted[i] >= n_classes) {
      throw InvalidArgumentError("ConfusionMatrix: label out of range at position " +
                                 std::to_string(i));
    }
    ++counts_[truth[i] * n_classes + predicted[i]];
  }
  total_ = truth.size();
}

uint64_t ConfusionMatrix::trace() const {
  uint64_t t = 0;
  for (std::size_t c = 0; c < n_classes_; ++c) t += at(c, c);
  return t;
}

double ConfusionMatrix::accuracy() const {
  if (total_ == 0) throw InvalidArgumentError("ConfusionMatrix: empty");
  return static_cast<double>(trace()) / static_cast<double>(total_);
}

double ConfusionMatrix::MacroF1() const {
  double sum = 0.0;
  std::size_t used = 0;
  for (std::size_t c = 0; c < n_classes_; ++c) {
    uint64_t row = 0;
    uint64_t col = 0;
    for (std::size_t o = 0; o < n_classes_; ++o) {
      row += at(c, o);
      col += at(o, c);
    }
    if (row + col == 0) continue;
    sum += 2.0 * static_cast<double>(at(c, c)) / static_cast<double>(row + col);
    ++used;
  }
  return used == 0 ? 0.0 : sum / static_cast<double>(used);
}

std::vector<std::vector<uint64_t>> ConfusionMatrix::rows() const {
  std::vector<std::vector<uint64_t>> out(n_classes_);
  for (std::size_t t = 0; t < n_classes_; ++t) {
    out[t].assign(counts_.begin() + static_cast<std::ptrdiff_t>(t * n_classes_),
                  counts_.begin() + static_cast<std::ptrdiff_t>((t + 1) * n_classes_));
  }
  return out;
}

uint32_t ArgMax(std::span<const double> values) {
  if (values.empty()) throw InvalidArgumentError("ArgMax: empty vector");
  uint32_t best = 0;
  for (uint32_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

}  // namespace deepforest
