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

#ifndef SOFTTRAJ_LINALG_HPP
#define SOFTTRAJ_LINALG_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Core>

#include "softtraj/dual.hpp"
#include "softtraj/errors.hpp"

namespace softtraj {

/// Solves A X = B for symmetric positive-definite A with an LDL^T
/// factorization. Works for any scalar type, so derivatives propagate
/// through the solve. A pivot below `pivot_tol` times the largest diagonal
/// entry is treated as loss of positive definiteness.
template <typename S>
MatrixX<S> spd_solve(const MatrixX<S>& A, const MatrixX<S>& B,
                     double pivot_tol = 1e-12) {
  const Eigen::Index n = A.rows();
  MatrixX<S> L = MatrixX<S>::Identity(n, n);
  VectorX<S> D(n);
  double max_diag = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    max_diag = std::max(max_diag, std::abs(value_of(A(i, i))));
  }
  double min_pivot = max_diag;
  for (Eigen::Index j = 0; j < n; ++j) {
    S dj = A(j, j);
    for (Eigen::Index k = 0; k < j; ++k) dj -= L(j, k) * L(j, k) * D(k);
    const double pivot = value_of(dj);
    if (!(pivot > pivot_tol * max_diag)) {
      std::ostringstream msg;
      msg << "matrix is not positive definite: pivot " << pivot << " at row "
          << j << " (largest diagonal " << max_diag << ")";
      throw NumericalError(msg.str(),
                           pivot > 0.0 ? max_diag / pivot
                                       : std::numeric_limits<double>::infinity());
    }
    min_pivot = std::min(min_pivot, pivot);
    D(j) = dj;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      S lij = A(i, j);
      for (Eigen::Index k = 0; k < j; ++k) lij -= L(i, k) * L(j, k) * D(k);
      L(i, j) = lij / dj;
    }
  }
  MatrixX<S> X = B;
  for (Eigen::Index c = 0; c < X.cols(); ++c) {
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index k = 0; k < i; ++k) X(i, c) -= L(i, k) * X(k, c);
    }
    for (Eigen::Index i = 0; i < n; ++i) X(i, c) /= D(i);
    for (Eigen::Index i = n - 1; i >= 0; --i) {
      for (Eigen::Index k = i + 1; k < n; ++k) X(i, c) -= L(k, i) * X(k, c);
    }
  }
  return X;
}

template <typename S>
VectorX<S> spd_solve(const MatrixX<S>& A, const VectorX<S>& b,
                     double pivot_tol = 1e-12) {
  MatrixX<S> B = b;
  return spd_solve<S>(A, B, pivot_tol).col(0);
}

inline Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& A) {
  return 0.5 * (A + A.transpose());
}

/// Relative error with an absolute floor so near-zero references do not
/// blow up the ratio.
inline double relative_error(double value, double reference,
                             double floor = 1.0) {
  return std::abs(value - reference) /
         std::max(std::abs(reference), floor);
}

inline double relative_error(const Eigen::MatrixXd& value,
                             const Eigen::MatrixXd& reference,
                             double floor = 1.0) {
  if (value.size() == 0) return 0.0;
  return (value - reference).cwiseAbs().maxCoeff() /
         std::max(reference.cwiseAbs().maxCoeff(), floor);
}

}  // namespace softtraj

#endif  // SOFTTRAJ_LINALG_HPP
