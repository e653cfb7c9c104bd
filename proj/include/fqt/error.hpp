// Copyright 2026 The fqt Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FQT_ERROR_HPP_
#define FQT_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace fqt {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Extents disagree with what an operation requires.
class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& what)
      : Error("dimension error: " + what) {}
};

// A scalar or configuration parameter is out of its valid range.
class ParameterError : public Error {
 public:
  explicit ParameterError(const std::string& what)
      : Error("parameter error: " + what) {}
};

// An indexed collection is incomplete or inconsistent.
class IntegrityError : public Error {
 public:
  explicit IntegrityError(const std::string& what)
      : Error("integrity error: " + what) {}
};

// NaN or Inf appeared where a finite value was required.
class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what)
      : Error("numeric error: " + what) {}
};

// An operation has nothing to reduce over (e.g. attention with no keys).
class DegenerateInputError : public Error {
 public:
  explicit DegenerateInputError(const std::string& what)
      : Error("degenerate input: " + what) {}
};

// Malformed file or stream contents.
class FormatError : public Error {
 public:
  explicit FormatError(const std::string& what)
      : Error("format error: " + what) {}
};

}  // namespace fqt

#endif  // FQT_ERROR_HPP_
