/*
 Copyright 2026 The softtraj Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#ifndef SOFTTRAJ_ERRORS_HPP
#define SOFTTRAJ_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace softtraj {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration: bad dimensions, violated parameter invariants,
/// malformed settings.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Non-finite or out-of-range inputs to an evaluation.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Linear-algebra failure (non-PD mass matrix, singular Jacobian).
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, double condition_estimate = 0.0)
      : Error(what), condition_estimate_(condition_estimate) {}
  double condition_estimate() const { return condition_estimate_; }

 private:
  double condition_estimate_;
};

/// Implicit-step Newton solve did not converge.
class IntegrationError : public Error {
 public:
  IntegrationError(const std::string& what, double residual_norm, int step = -1)
      : Error(what), residual_norm_(residual_norm), step_(step) {}
  double residual_norm() const { return residual_norm_; }
  /// Index of the failing step inside a rollout, -1 for a single step.
  int step() const { return step_; }

 private:
  double residual_norm_;
  int step_;
};

/// Requested capability (e.g. second-order derivatives) is not available.
class UnsupportedOperation : public Error {
 public:
  using Error::Error;
};

}  // namespace softtraj

#endif  // SOFTTRAJ_ERRORS_HPP
