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

#ifndef DEEPFOREST_DATASET_H_
#define DEEPFOREST_DATASET_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace deepforest {

// Structural metadata for 2-D scanning: features are a row-major
// height x width panel.
struct PanelShape {
  std::size_t height = 0;
  std::size_t width = 0;

  std::size_t size() const { return height * width; }
  bool operator==(const PanelShape&) const = default;
};

// Dense row-major matrix of 64-bit reals.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::size_t rows, std::size_t cols);
  FeatureMatrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  std::span<const double> row(std::size_t i) const {
    return {values_.data() + i * cols_, cols_};
  }
  std::span<double> row(std::size_t i) {
    return {values_.data() + i * cols_, cols_};
  }
  double at(std::size_t i, std::size_t j) const { return values_[i * cols_ + j]; }
  double& at(std::size_t i, std::size_t j) { return values_[i * cols_ + j]; }

  const std::vector<double>& values() const { return values_; }

  // Rows `indices` in the given order.
  FeatureMatrix SelectRows(std::span<const std::size_t> indices) const;

  // [left | right], row by row. Row counts must match.
  static FeatureMatrix ConcatColumns(const FeatureMatrix& left,
                                     const FeatureMatrix& right);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

// Dense mapping between raw label strings and class ids [0, n), assigned in
// first-seen order.
class LabelMap {
 public:
  LabelMap() = default;
  explicit LabelMap(std::vector<std::string> names);

  uint32_t Intern(std::string_view name);
  std::optional<uint32_t> Find(std::string_view name) const;
  const std::string& Name(uint32_t id) const { return names_.at(id); }
  const std::vector<std::string>& names() const { return names_; }
  std::size_t size() const { return names_.size(); }

  bool operator==(const LabelMap& other) const { return names_ == other.names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, uint32_t> ids_;
};

// Immutable feature matrix with optional labels.
//
// Invariants checked at construction: every label < n_classes, and when a
// panel shape is given, height * width == n_features.
class Dataset {
 public:
  Dataset() = default;
  Dataset(FeatureMatrix features, std::vector<uint32_t> labels,
          std::size_t n_classes,
          std::optional<PanelShape> panel_shape = std::nullopt);

  static Dataset Unlabeled(FeatureMatrix features,
                           std::optional<PanelShape> panel_shape = std::nullopt);

  std::size_t n_rows() const { return features_.rows(); }
  std::size_t n_features() const { return features_.cols(); }
  std::size_t n_classes() const { return n_classes_; }
  bool has_labels() const { return labeled_; }

  const FeatureMatrix& features() const { return features_; }
  std::span<const double> row(std::size_t i) const { return features_.row(i); }
  std::span<const uint32_t> labels() const { return labels_; }
  uint32_t label(std::size_t i) const { return labels_[i]; }
  const std::optional<PanelShape>& panel_shape() const { return panel_shape_; }

  // Raw label names, when the dataset came from a file.
  const LabelMap& label_map() const { return label_map_; }
  void set_label_map(LabelMap map) { label_map_ = std::move(map); }

  // Index of the source example each row was extracted from (multi-grained
  // scanning); empty for ordinary datasets.
  std::span<const std::size_t> provenance() const { return provenance_; }
  void set_provenance(std::vector<std::size_t> provenance);

  std::vector<std::size_t> ClassCounts() const;

  // Rows `indices` in the given order; labels, panel shape and label map
  // carry over.
  Dataset Subset(std::span<const std::size_t> indices) const;

 private:
  FeatureMatrix features_;
  std::vector<uint32_t> labels_;
  std::size_t n_classes_ = 0;
  bool labeled_ = false;
  std::optional<PanelShape> panel_shape_;
  LabelMap label_map_;
  std::vector<std::size_t> provenance_;
};

struct CsvSchema {
  // Header name of the label column. Empty means the last column.
  std::string label_column;
  // Every column is a feature; the dataset has no labels.
  bool unlabeled = false;
  std::optional<PanelShape> panel_shape;
};

// Reads an RFC 4180 CSV file with a header row. Labels are densified to
// [0, n_classes) in first-seen order unless `fixed_labels` is given, in which
// case labels are looked up in it and unknown labels are an error. When the
// label column is absent from the header the dataset is unlabeled.
Dataset LoadCsv(const std::string& path, const CsvSchema& schema,
                const LabelMap* fixed_labels = nullptr);
Dataset ParseCsv(std::string_view text, const CsvSchema& schema,
                 const LabelMap* fixed_labels = nullptr);

struct SplitIndices {
  std::vector<std::size_t> growing;
  std::vector<std::size_t> estimating;
};

// Stratified split of positions [0, labels.size()). Every class contributes
// floor(fraction * n_c) rows to the growing part; the remaining
// round(fraction * n) - sum(floor) rows go to the classes with the largest
// fractional remainders (lowest class id on ties). Each part is returned in
// ascending order. Throws DataError if a present class has < 2 instances.
SplitIndices StratifiedSplitIndices(std::span<const uint32_t> labels,
                                    std::size_t n_classes, double fraction,
                                    uint64_t seed);

struct SplitPair {
  Dataset growing;
  Dataset estimating;
  SplitIndices indices;
  uint64_t seed = 0;
};

SplitPair StratifiedSplit(const Dataset& ds, double fraction, uint64_t seed);

// k disjoint index sets covering [0, n), sizes differing by at most one
// (the first n % k folds are larger). Each fold is sorted.
std::vector<std::vector<std::size_t>> KFoldIndices(std::size_t n, std::size_t k,
                                                   uint64_t seed);

// Like KFoldIndices but each class is dealt round-robin across folds, so
// every fold holds floor or ceil of n_c / k members of class c.
std::vector<std::vector<std::size_t>> StratifiedKFoldIndices(
    std::span<const uint32_t> labels, std::size_t n_classes, std::size_t k,
    uint64_t seed);

}  // namespace deepforest

#endif  // DEEPFOREST_DATASET_H_
