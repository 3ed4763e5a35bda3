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

#ifndef DEEPFOREST_ERROR_H_
#define DEEPFOREST_ERROR_H_

#include <stdexcept>
#include <string>

namespace deepforest {

// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A precondition on an argument or configuration value does not hold.
class InvalidArgumentError : public Error {
 public:
  using Error::Error;
};

// Malformed text input (CSV cells, configuration files).
class ParseError : public Error {
 public:
  using Error::Error;
};

// Feature vector or matrix width differs from what a model was trained on.
class DimensionMismatchError : public Error {
 public:
  using Error::Error;
};

// Training data does not satisfy a learning precondition, e.g. a class is
// missing from a cross-validation training part.
class DataError : public Error {
 public:
  using Error::Error;
};

// Model file cannot be decoded.
class FormatError : public Error {
 public:
  using Error::Error;
};

class ChecksumError : public FormatError {
 public:
  using FormatError::FormatError;
};

class VersionMismatchError : public FormatError {
 public:
  using FormatError::FormatError;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace deepforest

#endif  // DEEPFOREST_ERROR_H_
