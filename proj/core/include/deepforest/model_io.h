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

#ifndef DEEPFOREST_MODEL_IO_H_
#define DEEPFOREST_MODEL_IO_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "deepforest/gcforest.h"

namespace deepforest {

inline constexpr uint16_t kFormatMajor = 1;
inline constexpr uint16_t kFormatMinor = 0;

// 64-bit FNV-1a.
uint64_t Fnv1a64(std::span<const uint8_t> bytes);

// Byte layout is documented in docs/model_format.md. Serialization holds no
// timestamps, so equal models give equal bytes.
std::vector<uint8_t> SerializeModel(const GcModel& model);

// Throws FormatError on bad magic or truncation, VersionMismatchError when
// the file was written by an incompatible format version, ChecksumError
// when the payload does not match its checksum. Nothing is decoded before
// the checksum passes.
GcModel DeserializeModel(std::span<const uint8_t> bytes);

void SaveModel(const GcModel& model, const std::string& path);
GcModel LoadModel(const std::string& path);

// Probe file: header f0..f{d-1},p0..p{c-1}; one row per probe input with the
// aggregated class vector. Values are written in shortest round-trip form,
// so re-parsing recovers every double exactly.
void WriteProbeCsv(const GcModel& model, const FeatureMatrix& inputs, const std::string& path);

struct ProbeCheck {
  std::size_t rows = 0;
  std::size_t mismatched_rows = 0;  // rows whose vectors differ in any bit
  double max_abs_diff = 0.0;
};
ProbeCheck VerifyProbeCsv(const GcModel& model, const std::string& path);

}  // namespace deepforest

#endif  // DEEPFOREST_MODEL_IO_H_
