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

#include <cmath>

#include <Eigen/Cholesky>
#include <gtest/gtest.h>

#include "softtraj/dual.hpp"
#include "softtraj/linalg.hpp"

namespace softtraj {
namespace {

using D = Dual<double>;

// f(x) = x^2 sin(x) / (1 + x) + sqrt(x) cos(x)
template <typename S>
S f(const S& x) {
  return x * x * sin(x) / (1.0 + x) + sqrt(x) * cos(x);
}

double df(double x) {
  const double num = x * x * std::sin(x);
  const double dnum = 2.0 * x * std::sin(x) + x * x * std::cos(x);
  return (dnum * (1.0 + x) - num) / ((1.0 + x) * (1.0 + x)) +
         0.5 / std::sqrt(x) * std::cos(x) - std::sqrt(x) * std::sin(x);
}

TEST(Dual, FirstDerivativeMatchesClosedForm) {
  for (double x : {0.3, 1.0, 2.5, 7.0}) {
    const D y = f(D(x, 1.0));
    EXPECT_NEAR(y.v, f(x), 1e-14);
    EXPECT_NEAR(y.d, df(x), 1e-12 * std::max(1.0, std::abs(df(x))));
  }
}

TEST(Dual, NestedDualGivesSecondDerivative) {
  // g(x, y) = sin(x y) + x^3 / y; d2g/dxdy = cos(xy) - xy sin(xy) - 3x^2/y^2.
  for (const auto& [x, y] : {std::pair{0.4, 1.3}, std::pair{-1.2, 2.0}}) {
    const Dual2 xd(D(x, 0.0), D(1.0, 0.0));
    const Dual2 yd(D(y, 1.0), D(0.0, 0.0));
    const Dual2 g = sin(xd * yd) + xd * xd * xd / yd;
    const double expected = std::cos(x * y) - x * y * std::sin(x * y) - 3.0 * x * x / (y * y);
    EXPECT_NEAR(second_component(g), expected, 1e-12);
    EXPECT_NEAR(g.v.d, x * std::cos(x * y) - x * x * x / (y * y), 1e-12);
    EXPECT_NEAR(g.d.v, y * std::cos(x * y) + 3.0 * x * x / y, 1e-12);
  }
}

TEST(Dual, ComparisonsUseValueOnly) {
  const D a(1.0, 5.0);
  const D b(1.0, -5.0);
  EXPECT_FALSE(a < b);
  EXPECT_FALSE(b < a);
  EXPECT_TRUE(a <= b && a >= b);
  EXPECT_FALSE(a == b);
  EXPECT_EQ(abs(D(-2.0, 1.0)).d, -1.0);
}

TEST(Dual, DerivativePropagatesThroughSpdSolve) {
  // d/dt of A(t)^{-1} b with A(t) = A0 + t A1 equals -A^{-1} A1 A^{-1} b.
  Eigen::Matrix3d A0;
  A0 << 4, 1, 0.5, 1, 3, 0.2, 0.5, 0.2, 2;
  Eigen::Matrix3d A1;
  A1 << 1, 0.3, 0, 0.3, -0.5, 0.1, 0, 0.1, 0.7;
  const Eigen::Vector3d b(1.0, -2.0, 0.5);
  MatrixX<D> A(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) A(i, j) = D(A0(i, j), A1(i, j));
  VectorX<D> bd(3);
  for (int i = 0; i < 3; ++i) bd(i) = D(b(i));
  const VectorX<D> x = spd_solve<D>(A, bd);
  const Eigen::Vector3d x0 = A0.ldlt().solve(b);
  const Eigen::Vector3d dx = -A0.ldlt().solve(A1 * x0);
  for (int i = 0; i < 3; ++i) {
    EXPECT_NEAR(x(i).v, x0(i), 1e-13);
    EXPECT_NEAR(x(i).d, dx(i), 1e-13);
  }
}

TEST(Dual, SpdSolveRejectsIndefiniteMatrix) {
  MatrixX<double> A(2, 2);
  A << 1.0, 2.0, 2.0, 1.0;
  VectorX<double> b = VectorX<double>::Ones(2);
  EXPECT_THROW(spd_solve<double>(A, b), NumericalError);
}

}  // namespace
}  // namespace softtraj
