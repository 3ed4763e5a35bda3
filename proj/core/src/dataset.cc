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

#include "deepforest/dataset.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <utility>

#include "deepforest/error.h"
#include "deepforest/rng.h"

namespace deepforest {

FeatureMatrix::FeatureMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), values_(rows * cols, 0.0) {}

FeatureMatrix::FeatureMatrix(std::size_t rows, std::size_t cols,
                             std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows * cols) {
    throw InvalidArgumentError("FeatureMatrix: " + std::to_string(values_.size()) +
                               " values for a " + std::to_string(rows) + "x" +
                               std::to_string(cols) + " matrix");
  }
}

FeatureMatrix FeatureMatrix::SelectRows(std::span<const std::size_t> indices) const {
  FeatureMatrix out(indices.size(), cols_);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const auto src = row(indices[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

FeatureMatrix FeatureMatrix::ConcatColumns(const FeatureMatrix& left,
                                           const FeatureMatrix& right) {
  if (left.rows() != right.rows()) {
    throw DimensionMismatchError("ConcatColumns: row counts differ (" +
                                 std::to_string(left.rows()) + " vs " +
                                 std::to_string(right.rows()) + ")");
  }
  FeatureMatrix out(left.rows(), left.cols() + right.cols());
  for (std::size_t i = 0; i < left.rows(); ++i) {
    auto dst = out.row(i);
    const auto l = left.row(i);
    const auto r = right.row(i);
    std::copy(l.begin(), l.end(), dst.begin());
    std::copy(r.begin(), r.end(), dst.begin() + static_cast<std::ptrdiff_t>(l.size()));
  }
  return out;
}

LabelMap::LabelMap(std::vector<std::string> names) {
  for (auto& name : names) Intern(name);
}

uint32_t LabelMap::Intern(std::string_view name) {
  if (auto id = Find(name)) return *id;
  const auto id = static_cast<uint32_t>(names_.size());
  names_.emplace_back(name);
  ids_.emplace(names_.back(), id);
  return id;
}

std::optional<uint32_t> LabelMap::Find(std::string_view name) const {
  const auto it = ids_.find(std::string(name));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

Dataset::Dataset(FeatureMatrix features, std::vector<uint32_t> labels,
                 std::size_t n_classes, std::optional<PanelShape> panel_shape)
    : features_(std::move(features)),
      labels_(std::move(labels)),
      n_classes_(n_classes),
      labeled_(true),
      panel_shape_(panel_shape) {
  if (labels_.size() != features_.rows()) {
    throw InvalidArgumentError("Dataset: " + std::to_string(labels_.size()) +
                               " labels for " + std::to_string(features_.rows()) +
                               " rows");
  }
  if (n_classes_ == 0) throw InvalidArgumentError("Dataset: n_classes must be positive");
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] >= n_classes_) {
      throw InvalidArgumentError("Dataset: label " + std::to_string(labels_[i]) +
                                 " at row " + std::to_string(i) +
                                 " is not below n_classes=" + std::to_string(n_classes_));
    }
  }
  if (panel_shape_ && panel_shape_->size() != features_.cols()) {
    throw InvalidArgumentError(
        "Dataset: panel shape " + std::to_string(panel_shape_->height) + "x" +
        std::to_string(panel_shape_->width) + " does not cover " +
        std::to_string(features_.cols()) + " features");
  }
}

Dataset Dataset::Unlabeled(FeatureMatrix features,
                           std::optional<PanelShape> panel_shape) {
  Dataset ds;
  ds.features_ = std::move(features);
  ds.panel_shape_ = panel_shape;
  if (panel_shape && panel_shape->size() != ds.features_.cols()) {
    throw InvalidArgumentError("Dataset: panel shape does not cover the features");
  }
  return ds;
}

void Dataset::set_provenance(std::vector<std::size_t> provenance) {
  if (provenance.size() != n_rows()) {
    throw InvalidArgumentError("Dataset: provenance size differs from row count");
  }
  provenance_ = std::move(provenance);
}

std::vector<std::size_t> Dataset::ClassCounts() const {
  std::vector<std::size_t> counts(n_classes_, 0);
  for (const auto y : labels_) ++counts[y];
  return counts;
}

Dataset Dataset::Subset(std::span<const std::size_t> indices) const {
  Dataset out;
  out.features_ = features_.SelectRows(indices);
  out.n_classes_ = n_classes_;
  out.labeled_ = labeled_;
  out.panel_shape_ = panel_shape_;
  out.label_map_ = label_map_;
  if (labeled_) {
    out.labels_.reserve(indices.size());
    for (const auto i : indices) out.labels_.push_back(labels_[i]);
  }
  if (!provenance_.empty()) {
    out.provenance_.reserve(indices.size());
    for (const auto i : indices) out.provenance_.push_back(provenance_[i]);
  }
  return out;
}

namespace {

// Splits CSV text into records of fields (RFC 4180: quoted fields, doubled
// quotes, CRLF or LF line ends). Records keep their starting line number.
struct CsvRecord {
  std::size_t line = 0;
  std::vector<std::string> fields;
};

std::vector<CsvRecord> SplitCsv(std::string_view text) {
  std::vector<CsvRecord> records;
  CsvRecord current;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t line = 1;
  current.line = 1;

  auto end_field = [&] {
    current.fields.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    const bool blank = current.fields.size() == 1 && current.fields[0].empty();
    if (!blank) records.push_back(std::move(current));
    current = CsvRecord{};
    current.line = line;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (field_started || !field.empty()) {
          throw ParseError("CSV line " + std::to_string(line) +
                           ": quote inside an unquoted field");
        }
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') break;
        ++line;
        end_record();
        break;
      case '\n':
        ++line;
        end_record();
        break;
      default:
        field.push_back(c);
        field_started = true;
    }
  }
  if (in_quotes) throw ParseError("CSV: unterminated quoted field");
  if (field_started || !current.fields.empty()) end_record();
  return records;
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

bool ParseReal(std::string_view cell, double* out) {
  cell = Trim(cell);
  if (cell.empty()) return false;
  if (cell.front() == '+') cell.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), *out);
  return ec == std::errc() && ptr == cell.data() + cell.size() && std::isfinite(*out);
}

}  // namespace

Dataset ParseCsv(std::string_view text, const CsvSchema& schema,
                 const LabelMap* fixed_labels) {
  const auto records = SplitCsv(text);
  if (records.empty()) throw ParseError("CSV: empty file");
  const auto& header = records.front().fields;

  std::optional<std::size_t> label_col;
  if (schema.unlabeled) {
    // all columns are features
  } else if (schema.label_column.empty()) {
    label_col = header.size() - 1;
  } else {
    for (std::size_t j = 0; j < header.size(); ++j) {
      if (Trim(header[j]) == schema.label_column) label_col = j;
    }
  }
  const std::size_t n_cols = header.size();
  const std::size_t n_features = n_cols - (label_col ? 1 : 0);
  if (n_features == 0) throw ParseError("CSV: no feature columns");

  const std::size_t n_rows = records.size() - 1;
  if (n_rows == 0) throw ParseError("CSV: header only, no data rows");
  std::vector<double> values;
  values.reserve(n_rows * n_features);
  std::vector<uint32_t> labels;
  LabelMap map = fixed_labels != nullptr ? *fixed_labels : LabelMap{};

  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.fields.size() != n_cols) {
      throw ParseError("CSV: ragged row " + std::to_string(r - 1) + " (line " +
                       std::to_string(rec.line) + ") has " +
                       std::to_string(rec.fields.size()) + " cells, expected " +
                       std::to_string(n_cols));
    }
    for (std::size_t j = 0; j < n_cols; ++j) {
      if (label_col && j == *label_col) {
        const auto name = Trim(rec.fields[j]);
        if (fixed_labels != nullptr) {
          const auto id = map.Find(name);
          if (!id) {
            throw ParseError("CSV: row " + std::to_string(r - 1) + " (line " +
                             std::to_string(rec.line) + ") has unknown label '" +
                             std::string(name) + "'");
          }
          labels.push_back(*id);
        } else {
          labels.push_back(map.Intern(name));
        }
        continue;
      }
      double v = 0.0;
      if (!ParseReal(rec.fields[j], &v)) {
        throw ParseError("CSV: row " + std::to_string(r - 1) + " (line " +
                         std::to_string(rec.line) + "), column " +
                         std::to_string(j) + " ('" + std::string(Trim(header[j])) +
                         "'): cannot parse '" + rec.fields[j] + "' as a real number");
      }
      values.push_back(v);
    }
  }

  FeatureMatrix features(n_rows, n_features, std::move(values));
  if (!label_col) return Dataset::Unlabeled(std::move(features), schema.panel_shape);
  const std::size_t n_classes = std::max<std::size_t>(1, map.size());
  Dataset ds(std::move(features), std::move(labels), n_classes, schema.panel_shape);
  ds.set_label_map(std::move(map));
  return ds;
}

Dataset LoadCsv(const std::string& path, const CsvSchema& schema,
                const LabelMap* fixed_labels) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return ParseCsv(buffer.str(), schema, fixed_labels);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

SplitIndices StratifiedSplitIndices(std::span<const uint32_t> labels,
                                    std::size_t n_classes, double fraction,
                                    uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw InvalidArgumentError("split fraction must be in (0, 1)");
  }
  std::vector<std::vector<std::size_t>> members(n_classes);
  for (std::size_t i = 0; i < labels.size(); ++i) members.at(labels[i]).push_back(i);
  for (std::size_t c = 0; c < n_classes; ++c) {
    if (members[c].size() == 1) {
      throw DataError("stratified split: class " + std::to_string(c) +
                      " has fewer than 2 instances");
    }
  }

  const auto total = static_cast<std::size_t>(std::llround(fraction * labels.size()));
  std::vector<std::size_t> take(n_classes);
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (std::size_t c = 0; c < n_classes; ++c) {
    const double exact = fraction * static_cast<double>(members[c].size());
    take[c] = static_cast<std::size_t>(std::floor(exact));
    assigned += take[c];
    remainders.emplace_back(exact - std::floor(exact), c);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t i = 0; assigned < total && i < remainders.size(); ++i) {
    const std::size_t c = remainders[i].second;
    if (take[c] < members[c].size()) {
      ++take[c];
      ++assigned;
    }
  }

  Rng rng(seed);
  SplitIndices out;
  for (std::size_t c = 0; c < n_classes; ++c) {
    auto& m = members[c];
    rng.Shuffle(std::span<std::size_t>(m));
    out.growing.insert(out.growing.end(), m.begin(), m.begin() + static_cast<std::ptrdiff_t>(take[c]));
    out.estimating.insert(out.estimating.end(), m.begin() + static_cast<std::ptrdiff_t>(take[c]), m.end());
  }
  std::sort(out.growing.begin(), out.growing.end());
  std::sort(out.estimating.begin(), out.estimating.end());
  return out;
}

SplitPair StratifiedSplit(const Dataset& ds, double fraction, uint64_t seed) {
  if (!ds.has_labels()) throw InvalidArgumentError("stratified split needs labels");
  SplitPair pair;
  pair.indices = StratifiedSplitIndices(ds.labels(), ds.n_classes(), fraction, seed);
  pair.growing = ds.Subset(pair.indices.growing);
  pair.estimating = ds.Subset(pair.indices.estimating);
  pair.seed = seed;
  return pair;
}

std::vector<std::vector<std::size_t>> KFoldIndices(std::size_t n, std::size_t k,
                                                   uint64_t seed) {
  if (k < 2) throw InvalidArgumentError("k-fold: k must be at least 2");
  if (k > n) {
    throw InvalidArgumentError("k-fold: k=" + std::to_string(k) +
                               " exceeds instance count " + std::to_string(n));
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.Shuffle(std::span<std::size_t>(order));

  std::vector<std::vector<std::size_t>> folds(k);
  std::size_t pos = 0;
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t size = n / k + (f < n % k ? 1 : 0);
    folds[f].assign(order.begin() + static_cast<std::ptrdiff_t>(pos),
                    order.begin() + static_cast<std::ptrdiff_t>(pos + size));
    std::sort(folds[f].begin(), folds[f].end());
    pos += size;
  }
  return folds;
}

std::vector<std::vector<std::size_t>> StratifiedKFoldIndices(
    std::span<const uint32_t> labels, std::size_t n_classes, std::size_t k,
    uint64_t seed) {
  if (k < 2) throw InvalidArgumentError("k-fold: k must be at least 2");
  if (k > labels.size()) {
    throw InvalidArgumentError("k-fold: k=" + std::to_string(k) +
                               " exceeds instance count " +
                               std::to_string(labels.size()));
  }
  std::vector<std::vector<std::size_t>> members(n_classes);
  for (std::size_t i = 0; i < labels.size(); ++i) members.at(labels[i]).push_back(i);

  Rng rng(seed);
  std::vector<std::vector<std::size_t>> folds(k);
  // The deal position carries across classes so fold sizes stay within one.
  std::size_t deal = 0;
  for (auto& m : members) {
    rng.Shuffle(std::span<std::size_t>(m));
    for (const auto i : m) folds[deal++ % k].push_back(i);
  }
  for (auto& f : folds) std::sort(f.begin(), f.end());
  return folds;
}

}  // namespace deepforest
