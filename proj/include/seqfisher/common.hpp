// Copyright 2026 The seqfisher Authors
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

#include <Eigen/Dense>

namespace seqfisher {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

// Unit convention used throughout: ħ = k_B = γ = 1. Times are γτ,
// energies are ratios to γ, Fisher informations are per outcome.

/// Base class for all library errors. The CLI maps these to exit code 1.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Shape or precondition violation on an input.
class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& what) : Error(what) {}
};

/// A numerical routine failed or an internal consistency check tripped.
class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what) : Error(what) {}
};

/// The outcome chain has no unique stationary distribution.
class DegenerateChainError : public Error {
 public:
  DegenerateChainError(const std::string& what, int multiplicity)
      : Error(what), multiplicity(multiplicity) {}
  int multiplicity;
};

/// Conditioning on an outcome whose probability is numerically zero.
class ZeroProbabilityError : public Error {
 public:
  explicit ZeroProbabilityError(const std::string& what) : Error(what) {}
};

}  // namespace seqfisher
