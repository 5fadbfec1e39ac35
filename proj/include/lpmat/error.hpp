// Copyright 2026 The lpmat Authors.
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

#include <complex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lpmat {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input: malformed config, violated precondition, unknown key.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what, std::string key = {})
      : Error(what), key_(std::move(key)) {}

  /// Name of the offending config key, empty when not applicable.
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

/// AR polynomial has roots inside or on the unit circle.
class CausalityError : public ValidationError {
 public:
  CausalityError(const std::string& what,
                 std::vector<std::complex<double>> roots)
      : ValidationError(what), roots_(std::move(roots)) {}

  const std::vector<std::complex<double>>& offending_roots() const noexcept {
    return roots_;
  }

 private:
  std::vector<std::complex<double>> roots_;
};

/// A numerical routine failed on valid input.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class NonConvergenceError : public NumericalError {
 public:
  NonConvergenceError(const std::string& what, double last_residual,
                      std::complex<double> z = {})
      : NumericalError(what), residual_(last_residual), z_(z) {}

  double last_residual() const noexcept { return residual_; }
  std::complex<double> z() const noexcept { return z_; }

 private:
  double residual_;
  std::complex<double> z_;
};

}  // namespace lpmat
