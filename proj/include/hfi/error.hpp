// Copyright 2026 The HFI Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef HFI_ERROR_HPP_
#define HFI_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace hfi {

// Root of every error thrown by the library. Callers that only need to
// report a message can catch this; the CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An argument is outside its documented range (odd kernel sizes, JPEG
// quality, crop fraction, empty score lists, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Malformed PNG/JPEG stream. `offset()` is the byte position at which the
// decoder gave up.
class DecodeError : public Error {
 public:
  DecodeError(const std::string& what, std::size_t offset)
      : Error(what + " (at byte offset " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

// Shapes of two images (or an image and a reconstructor) do not agree.
class GeometryError : public Error {
 public:
  using Error::Error;
};

// A model asset is missing, corrupt, or fails checksum verification.
class AssetError : public Error {
 public:
  using Error::Error;
};

// The registry file is unreadable or contains invalid entries.
class RegistryError : public Error {
 public:
  using Error::Error;
};

// NaN/Inf surfaced inside a computation.
class NumericError : public Error {
 public:
  using Error::Error;
};

// An operation was invoked on an object that does not satisfy its contract
// (e.g. a finite-difference check against a nonlinear reconstructor).
class ContractError : public Error {
 public:
  using Error::Error;
};

// An evaluation task could not produce a trustworthy result.
class TaskError : public Error {
 public:
  using Error::Error;
};

}  // namespace hfi

#endif  // HFI_ERROR_HPP_
