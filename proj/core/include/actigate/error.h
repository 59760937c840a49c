/*
 * Copyright 2026 The Actigate Authors.
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

#ifndef ACTIGATE_ERROR_H_
#define ACTIGATE_ERROR_H_

#include <stdexcept>
#include <string>

namespace actigate {

// Base class of every error raised by the library. The subclasses map onto the
// exit codes of the command-line tool: storage problems are I/O failures,
// everything else is a validation failure of the inputs.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An input violates a documented invariant (non-finite value, soft label,
// out-of-range threshold, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Shapes do not line up.
class DimensionError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Reading or writing the filesystem failed.
class StorageError : public Error {
 public:
  using Error::Error;
};

// A persisted blob, manifest line or checkpoint does not decode.
class CorruptionError : public Error {
 public:
  using Error::Error;
};

// An id is not present in a store.
class NotFoundError : public Error {
 public:
  using Error::Error;
};

}  // namespace actigate

#endif  // ACTIGATE_ERROR_H_
