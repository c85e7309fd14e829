// Copyright 2026 The fisherctl Authors.
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

namespace fisherctl {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not agree (operator vs. superoperator dimension, POVM vs. state, ...).
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A precondition on an input value failed (non-Hermitian operator, negative rate, bad index).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Propagation or linear algebra produced a non-finite or invariant-violating result.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// An outcome with vanishing probability carries a non-vanishing derivative, so its
/// Fisher-information contribution is genuinely singular.
class SingularContribution : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// A closed-form expression was evaluated at one of its removable singularities.
class SingularDenominator : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace fisherctl
