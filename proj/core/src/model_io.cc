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

#include "deepforest/model_io.h"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <utility>

#include "deepforest/error.h"

namespace deepforest {
namespace {

constexpr char kMagic[8] = {'G', 'C', 'F', 'O', 'R', 'E', 'S', 'T'};
constexpr std::size_t kHeaderSize = 32;
constexpr uint8_t kLeafTag = 0;
constexpr uint8_t kInternalTag = 1;

class Writer {
 public:
  void U8(uint8_t v) { out_.push_back(v); }
  void U16(uint16_t v) { Le(v, 2); }
  void U32(std::size_t v) {
    if (v > UINT32_MAX) throw FormatError("model field exceeds 32 bits");
    Le(v, 4);
  }
  void U64(uint64_t v) { Le(v, 8); }
  void F64(double v) { Le(std::bit_cast<uint64_t>(v), 8); }
  void Bool(bool v) { U8(v ? 1 : 0); }
  void Str(const std::string& s) {
    U32(s.size());
    out_.insert(out_.end(), s.begin(), s.end());
  }
  std::vector<uint8_t>& bytes() { return out_; }

 private:
  void Le(uint64_t v, int n) {
    for (int i = 0; i < n; ++i) out_.push_back(static_cast<uint8_t>(v >> (8 * i)));
  }
  std::vector<uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const uint8_t> bytes) : bytes_(bytes) {}

  uint8_t U8() { return static_cast<uint8_t>(Le(1)); }
  uint16_t U16() { return static_cast<uint16_t>(Le(2)); }
  uint32_t U32() { return static_cast<uint32_t>(Le(4)); }
  uint64_t U64() { return Le(8); }
  double F64() { return std::bit_cast<double>(Le(8)); }
  bool Bool() {
    const uint8_t v = U8();
    if (v > 1) throw FormatError("model file: invalid boolean");
    return v == 1;
  }
  std::string Str() {
    const uint32_t n = U32();
    Need(n);
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  // Element count that must fit in the remaining bytes at `min_size` each;
  // guards allocations against corrupt lengths.
  uint32_t Count(std::size_t min_size) {
    const uint32_t n = U32();
    if (min_size > 0 && n > (bytes_.size() - pos_) / min_size) {
      throw FormatError("model file: truncated payload");
    }
    return n;
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  void Need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw FormatError("model file: truncated payload");
  }
  uint64_t Le(int n) {
    Need(static_cast<std::size_t>(n));
    uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= static_cast<uint64_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += static_cast<std::size_t>(n);
    return v;
  }

  std::span<const uint8_t> bytes_;
  std::size_t pos_ = 0;
};

template <typename E>
E Enum(uint8_t v, uint8_t max, const char* what) {
  if (v > max) throw FormatError(std::string("model file: invalid ") + what);
  return static_cast<E>(v);
}

// Config -------------------------------------------------------------------

void Put(Writer& w, const ForestConfig& c) {
  w.U8(static_cast<uint8_t>(c.tree.kind));
  w.U8(static_cast<uint8_t>(c.tree.max_features.mode));
  w.U32(c.tree.max_features.count);
  w.Bool(c.tree.depth_cap.has_value());
  w.U32(c.tree.depth_cap.value_or(0));
  w.U32(c.n_trees);
  w.Bool(c.bootstrap);
  w.U64(c.seed);
}

ForestConfig GetForestConfig(Reader& r) {
  ForestConfig c;
  c.tree.kind = Enum<TreeKind>(r.U8(), 1, "tree kind");
  c.tree.max_features.mode = Enum<MaxFeatures::Mode>(r.U8(), 2, "max_features mode");
  c.tree.max_features.count = r.U32();
  const bool capped = r.Bool();
  const uint32_t cap = r.U32();
  if (capped) c.tree.depth_cap = cap;
  c.n_trees = r.U32();
  c.bootstrap = r.Bool();
  c.seed = r.U64();
  return c;
}

void Put(Writer& w, const std::vector<ForestConfig>& forests) {
  w.U32(forests.size());
  for (const auto& f : forests) Put(w, f);
}

std::vector<ForestConfig> GetForestConfigs(Reader& r) {
  std::vector<ForestConfig> out(r.Count(1));
  for (auto& f : out) f = GetForestConfig(r);
  return out;
}

void Put(Writer& w, const GrainConfig& g) {
  w.U32(g.window.height);
  w.U32(g.window.width);
  w.U32(g.stride);
  w.Bool(g.subsample.has_value());
  w.F64(g.subsample.value_or(0.0));
  Put(w, g.forests);
}

GrainConfig GetGrainConfig(Reader& r) {
  GrainConfig g;
  g.window.height = r.U32();
  g.window.width = r.U32();
  g.stride = r.U32();
  const bool has_subsample = r.Bool();
  const double subsample = r.F64();
  if (has_subsample) g.subsample = subsample;
  g.forests = GetForestConfigs(r);
  return g;
}

void Put(Writer& w, const GcConfig& c) {
  w.U8(static_cast<uint8_t>(c.variant));
  w.Bool(c.oof_scanning);
  w.U32(c.scanning_folds);
  w.U64(c.seed);
  w.U8(static_cast<uint8_t>(c.termination.criterion));
  w.F64(c.termination.tolerance);
  w.U32(c.termination.patience);
  w.U32(c.termination.max_levels);
  w.F64(c.termination.growing_fraction);
  w.U32(c.level.k_folds);
  w.U8(static_cast<uint8_t>(c.level.cv_mode));
  Put(w, c.level.forests);
  w.U32(c.grains.size());
  for (const auto& g : c.grains) Put(w, g);
}

GcConfig GetGcConfig(Reader& r) {
  GcConfig c;
  c.variant = Enum<Variant>(r.U8(), 2, "variant");
  c.oof_scanning = r.Bool();
  c.scanning_folds = r.U32();
  c.seed = r.U64();
  c.termination.criterion = Enum<TerminationCriterion>(r.U8(), 1, "termination criterion");
  c.termination.tolerance = r.F64();
  c.termination.patience = r.U32();
  c.termination.max_levels = r.U32();
  c.termination.growing_fraction = r.F64();
  c.level.k_folds = r.U32();
  c.level.cv_mode = Enum<CvMode>(r.U8(), 1, "cv mode");
  c.level.forests = GetForestConfigs(r);
  c.grains.resize(r.Count(1));
  for (auto& g : c.grains) g = GetGrainConfig(r);
  return c;
}

// Trees and forests ---------------------------------------------------------

void Put(Writer& w, const Tree& t) {
  w.U32(t.nodes().size());
  for (const auto& node : t.nodes()) {
    if (node.is_leaf()) {
      w.U8(kLeafTag);
      const auto entries = t.leaf_entries(node.link);
      w.U32(entries.size());
      for (const auto& e : entries) {
        w.U32(e.label);
        w.U32(e.count);
      }
    } else {
      w.U8(kInternalTag);
      w.U32(static_cast<uint32_t>(node.feature));
      w.F64(node.threshold);
    }
  }
}

Tree GetTree(Reader& r, std::size_t n_classes, std::size_t n_features) {
  const uint32_t n_nodes = r.Count(5);
  TreeBuilder builder(n_classes, n_features);
  std::vector<Tree::LeafEntry> entries;
  for (uint32_t i = 0; i < n_nodes; ++i) {
    const uint8_t tag = r.U8();
    if (tag == kInternalTag) {
      const uint32_t feature = r.U32();
      builder.AddInternal(feature, r.F64());
    } else if (tag == kLeafTag) {
      entries.resize(r.Count(8));
      for (auto& e : entries) {
        e.label = r.U32();
        e.count = r.U32();
      }
      builder.AddLeafEntries(entries);
    } else {
      throw FormatError("model file: unknown node tag " + std::to_string(tag));
    }
  }
  return builder.Finish();
}

void Put(Writer& w, const Forest& f) {
  Put(w, f.config());
  w.U32(f.n_features());
  w.U32(f.n_classes());
  w.U32(f.trees().size());
  for (const auto& t : f.trees()) Put(w, t);
}

Forest GetForest(Reader& r) {
  ForestConfig config = GetForestConfig(r);
  const uint32_t n_features = r.U32();
  const uint32_t n_classes = r.U32();
  if (n_classes == 0) throw FormatError("model file: forest without classes");
  std::vector<Tree> trees(r.Count(4));
  for (auto& t : trees) t = GetTree(r, n_classes, n_features);
  try {
    return Forest(std::move(config), std::move(trees), n_classes, n_features);
  } catch (const InvalidArgumentError& e) {
    throw FormatError(std::string("model file: ") + e.what());
  }
}

void Put(Writer& w, std::span<const Forest> forests) {
  w.U32(forests.size());
  for (const auto& f : forests) Put(w, f);
}

std::vector<Forest> GetForests(Reader& r) {
  std::vector<Forest> out(r.Count(1));
  for (auto& f : out) f = GetForest(r);
  return out;
}

// Model ---------------------------------------------------------------------

void PutPayload(Writer& w, const GcModel& m) {
  Put(w, m.config());
  w.U32(m.labels().size());
  for (const auto& name : m.labels().names()) w.Str(name);
  w.U32(m.raw_dim());
  w.Bool(m.panel().has_value());
  w.U32(m.panel() ? m.panel()->height : 0);
  w.U32(m.panel() ? m.panel()->width : 0);
  w.U32(m.n_classes());

  w.U32(m.grains().size());
  for (const auto& g : m.grains()) Put(w, g.forests());

  const CascadeModel& c = m.cascade();
  w.U32(c.source_widths.size());
  for (const auto width : c.source_widths) w.U32(width);
  w.U8(static_cast<uint8_t>(c.termination.criterion));
  w.U32(c.termination.level_accuracy.size());
  for (const auto a : c.termination.level_accuracy) w.F64(a);
  w.U32(c.termination.chosen_levels);
  w.U32(c.levels.size());
  for (const auto& level : c.levels) {
    w.U32(level.input_dim());
    Put(w, level.forests());
  }
}

GcModel GetPayload(Reader& r) {
  GcConfig config = GetGcConfig(r);
  std::vector<std::string> names(r.Count(4));
  for (auto& n : names) n = r.Str();
  const uint32_t raw_dim = r.U32();
  const bool has_panel = r.Bool();
  const uint32_t height = r.U32();
  const uint32_t width = r.U32();
  std::optional<PanelShape> panel;
  if (has_panel) panel = PanelShape{height, width};
  const uint32_t n_classes = r.U32();

  try {
    const uint32_t n_grains = r.Count(4);
    if (n_grains != config.grains.size()) {
      throw FormatError("model file: grain count disagrees with the stored config");
    }
    std::vector<GrainTransformer> grains;
    for (uint32_t g = 0; g < n_grains; ++g) {
      grains.emplace_back(config.grains[g], GetForests(r), raw_dim, panel, n_classes);
    }

    CascadeModel cascade;
    cascade.n_classes = n_classes;
    cascade.source_widths.resize(r.Count(4));
    for (auto& width_s : cascade.source_widths) width_s = r.U32();
    cascade.termination.criterion =
        Enum<TerminationCriterion>(r.U8(), 1, "termination criterion");
    cascade.termination.level_accuracy.resize(r.Count(8));
    for (auto& a : cascade.termination.level_accuracy) a = r.F64();
    cascade.termination.chosen_levels = r.U32();
    const uint32_t n_levels = r.Count(8);
    if (n_levels == 0 || cascade.source_widths.empty()) {
      throw FormatError("model file: empty cascade");
    }
    for (uint32_t l = 0; l < n_levels; ++l) {
      const uint32_t input_dim = r.U32();
      cascade.levels.emplace_back(GetForests(r), input_dim, n_classes);
      // Width chain: base source ++ previous level output.
      const std::size_t expected = cascade.source_widths[cascade.SourceOf(l)] +
                                   (l == 0 ? 0 : cascade.levels[l - 1].output_dim());
      if (input_dim != expected) throw FormatError("model file: level width chain broken");
    }
    return GcModel(std::move(config), std::move(grains), std::move(cascade),
                   LabelMap(std::move(names)), raw_dim, panel, n_classes);
  } catch (const InvalidArgumentError& e) {
    throw FormatError(std::string("model file: ") + e.what());
  } catch (const DimensionMismatchError& e) {
    throw FormatError(std::string("model file: ") + e.what());
  }
}

uint64_t ReadLe(std::span<const uint8_t> b, std::size_t pos, int n) {
  uint64_t v = 0;
  for (int i = 0; i < n; ++i) v |= static_cast<uint64_t>(b[pos + i]) << (8 * i);
  return v;
}

std::string FormatDouble(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

uint64_t Fnv1a64(std::span<const uint8_t> bytes) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::vector<uint8_t> SerializeModel(const GcModel& model) {
  Writer payload;
  PutPayload(payload, model);
  const auto& body = payload.bytes();
  Writer out;
  for (const char c : kMagic) out.U8(static_cast<uint8_t>(c));
  out.U16(kFormatMajor);
  out.U16(kFormatMinor);
  out.U32(0);
  out.U64(body.size());
  out.U64(Fnv1a64(body));
  auto& bytes = out.bytes();
  bytes.insert(bytes.end(), body.begin(), body.end());
  return std::move(bytes);
}

GcModel DeserializeModel(std::span<const uint8_t> bytes) {
  if (bytes.size() < sizeof(kMagic) ||
      std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw FormatError("not a gcForest model file (bad magic)");
  }
  if (bytes.size() < kHeaderSize) throw FormatError("model file: truncated header");
  const auto major = static_cast<uint16_t>(ReadLe(bytes, 8, 2));
  const auto minor = static_cast<uint16_t>(ReadLe(bytes, 10, 2));
  if (major != kFormatMajor || minor > kFormatMinor) {
    throw VersionMismatchError("model file format " + std::to_string(major) + "." +
                               std::to_string(minor) + " is not readable by this build (" +
                               std::to_string(kFormatMajor) + "." +
                               std::to_string(kFormatMinor) + ")");
  }
  const uint64_t length = ReadLe(bytes, 16, 8);
  const uint64_t checksum = ReadLe(bytes, 24, 8);
  if (bytes.size() - kHeaderSize < length) {
    throw FormatError("model file: truncated (" + std::to_string(bytes.size() - kHeaderSize) +
                      " of " + std::to_string(length) + " payload bytes)");
  }
  if (bytes.size() - kHeaderSize > length) throw FormatError("model file: trailing bytes");
  const auto payload = bytes.subspan(kHeaderSize);
  if (Fnv1a64(payload) != checksum) throw ChecksumError("model file: checksum mismatch");
  Reader r(payload);
  GcModel model = GetPayload(r);
  if (!r.done()) throw FormatError("model file: unread payload bytes");
  return model;
}

void SaveModel(const GcModel& model, const std::string& path) {
  const auto bytes = SerializeModel(model);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write to " + path + " failed");
}

GcModel LoadModel(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  const std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  return DeserializeModel(bytes);
}

void WriteProbeCsv(const GcModel& model, const FeatureMatrix& inputs, const std::string& path) {
  const Prediction p = model.PredictBatch(inputs);
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  for (std::size_t j = 0; j < inputs.cols(); ++j) out << 'f' << j << ',';
  for (std::size_t c = 0; c < model.n_classes(); ++c) {
    out << 'p' << c << (c + 1 < model.n_classes() ? ',' : '\n');
  }
  for (std::size_t i = 0; i < inputs.rows(); ++i) {
    for (const double v : inputs.row(i)) out << FormatDouble(v) << ',';
    const auto agg = p.aggregated.row(i);
    for (std::size_t c = 0; c < agg.size(); ++c) {
      out << FormatDouble(agg[c]) << (c + 1 < agg.size() ? ',' : '\n');
    }
  }
  if (!out) throw IoError("write to " + path + " failed");
}

ProbeCheck VerifyProbeCsv(const GcModel& model, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  const std::size_t d = model.raw_dim();
  const std::size_t nc = model.n_classes();
  std::string line;
  std::getline(in, line);  // header
  std::vector<double> inputs;
  std::vector<double> expected;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::size_t col = 0;
    const char* p = line.data();
    const char* end = p + line.size();
    while (p <= end) {
      const char* comma = std::find(p, end, ',');
      double v = 0.0;
      const auto res = std::from_chars(p, comma, v);
      if (res.ec != std::errc() || res.ptr != comma) {
        throw ParseError(path + ": bad number in row " + std::to_string(rows + 1));
      }
      (col < d ? inputs : expected).push_back(v);
      ++col;
      p = comma + 1;
    }
    if (col != d + nc) {
      throw ParseError(path + ": row " + std::to_string(rows + 1) + " has " +
                       std::to_string(col) + " cells, expected " + std::to_string(d + nc));
    }
    ++rows;
  }
  const Prediction pred = model.PredictBatch(FeatureMatrix(rows, d, std::move(inputs)));
  ProbeCheck check;
  check.rows = rows;
  for (std::size_t i = 0; i < rows; ++i) {
    bool same = true;
    for (std::size_t c = 0; c < nc; ++c) {
      const double got = pred.aggregated.at(i, c);
      const double want = expected[i * nc + c];
      same = same && std::bit_cast<uint64_t>(got) == std::bit_cast<uint64_t>(want);
      check.max_abs_diff = std::max(check.max_abs_diff, std::abs(got - want));
    }
    check.mismatched_rows += same ? 0 : 1;
  }
  return check;
}

}  // namespace deepforest
