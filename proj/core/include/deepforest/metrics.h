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

#ifndef DEEPFOREST_METRICS_H_
#define DEEPFOREST_METRICS_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace deepforest {

// Fraction of positions where predicted == truth. Throws
// InvalidArgumentError on length mismatch or empty input.
double Accuracy(std::span<const uint32_t> predicted, std::span<const uint32_t> truth);

// counts[t][p]: rows are true classes, columns predicted classes.
class ConfusionMatrix {
 public:
  ConfusionMatrix(std::span<const uint32_t> predicted, std::span<const uint32_t> truth,
                  std::size_t n_classes);

  std::size_t n_classes() const { return n_classes_; }
  uint64_t at(std::size_t truth, std::size_t predicted) const {
    return counts_[truth * n_classes_ + predicted];
  }
  uint64_t total() const { return total_; }
  uint64_t trace() const;
  double accuracy() const;
  // Unweighted mean over classes of per-class F1. A class with no true and
  // no predicted instances is skipped.
  double MacroF1() const;

  std::vector<std::vector<uint64_t>> rows() const;

 private:
  std::size_t n_classes_;
  std::vector<uint64_t> counts_;
  uint64_t total_ = 0;
};

// Index of the largest component, lowest index on ties.
uint32_t ArgMax(std::span<const double> values);

}  // namespace deepforest

#endif  // DEEPFOREST_METRICS_H_
