// Copyright 2026 The DDPPM Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DDPPM_CORE_COMMON_H_
#define DDPPM_CORE_COMMON_H_

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace ddppm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr char kVersion[] = "0.1.0";

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller-supplied value violates a documented precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Malformed input file or configuration document.
class ParseError : public Error {
 public:
  using Error::Error;
};

// A computation left its numerically meaningful range (degenerate
// normalization, non-convergent iteration, indefinite covariance).
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace ddppm

#endif  // DDPPM_CORE_COMMON_H_
