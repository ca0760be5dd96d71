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

#include <gtest/gtest.h>

#include "softtraj/quadrature.hpp"

namespace softtraj {
namespace {

TEST(GaussLegendre, ExactForDegreeTwoNMinusOne) {
  for (int n = 1; n <= 12; ++n) {
    const QuadratureRule rule = gauss_legendre(n);
    ASSERT_EQ(rule.nodes.size(), static_cast<std::size_t>(n));
    for (int k = 0; k <= 2 * n - 1; ++k) {
      double sum = 0.0;
      for (int i = 0; i < n; ++i) sum += rule.weights[i] * std::pow(rule.nodes[i], k);
      const double exact = k % 2 == 1 ? 0.0 : 2.0 / (k + 1);
      EXPECT_NEAR(sum, exact, 1e-13) << "n=" << n << " k=" << k;
    }
  }
}

TEST(GaussLegendre, NodesAscendingAndSymmetric) {
  for (int n = 1; n <= 12; ++n) {
    const QuadratureRule rule = gauss_legendre(n);
    for (int i = 0; i < n; ++i) {
      EXPECT_GT(rule.weights[i], 0.0);
      EXPECT_NEAR(rule.nodes[i], -rule.nodes[n - 1 - i], 1e-14);
      if (i > 0) {
        EXPECT_LT(rule.nodes[i - 1], rule.nodes[i]);
      }
    }
  }
}

TEST(ShiftedLegendre, MatchesExplicitPolynomials) {
  for (double s : {0.0, 0.13, 0.5, 0.77, 1.0}) {
    EXPECT_DOUBLE_EQ(shifted_legendre(0, s), 1.0);
    EXPECT_NEAR(shifted_legendre(1, s), 2 * s - 1, 1e-15);
    EXPECT_NEAR(shifted_legendre(2, s), 6 * s * s - 6 * s + 1, 1e-14);
    EXPECT_NEAR(shifted_legendre(3, s), 20 * s * s * s - 30 * s * s + 12 * s - 1, 1e-14);
  }
}

TEST(ShiftedLegendre, OrthogonalOnUnitInterval) {
  const QuadratureRule rule = gauss_legendre(10);
  for (int k = 0; k <= 5; ++k) {
    for (int l = 0; l <= 5; ++l) {
      double sum = 0.0;
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double s = 0.5 * (rule.nodes[i] + 1.0);
        sum += 0.5 * rule.weights[i] * shifted_legendre(k, s) * shifted_legendre(l, s);
      }
      EXPECT_NEAR(sum, k == l ? 1.0 / (2 * k + 1) : 0.0, 1e-14);
    }
  }
}

}  // namespace
}  // namespace softtraj
