// Copyright 2026 The ADDM Authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace addm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Incompatible operand shapes or dimensions.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A parameter outside its valid domain (gamma <= 0, alpha > 1, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A NaN or infinity showed up where a finite value is required.
class NonFiniteError : public Error {
 public:
  NonFiniteError(const std::string& what, std::size_t node)
      : Error(what), node_(node) {}
  std::size_t node() const noexcept { return node_; }

 private:
  std::size_t node_;
};

/// Training loss became non-finite. Carries the last finite loss seen.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, double last_finite_loss)
      : Error(what), last_finite_loss_(last_finite_loss) {}
  double last_finite_loss() const noexcept { return last_finite_loss_; }

 private:
  double last_finite_loss_;
};

/// Malformed input file (CSV or model file).
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace addm
