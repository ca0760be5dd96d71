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

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "softtraj/boxqp.hpp"
#include "test_util.hpp"

namespace softtraj {
namespace {

// Minimum over every face of the box: each coordinate is free, at its lower
// bound or at its upper bound; the free block is solved exactly.
double brute_force_minimum(const MatrixXd& H, const VectorXd& g, const VectorXd& lb,
                           const VectorXd& ub) {
  const int m = static_cast<int>(g.size());
  int faces = 1;
  for (int i = 0; i < m; ++i) faces *= 3;
  double best = std::numeric_limits<double>::infinity();
  for (int f = 0; f < faces; ++f) {
    VectorXd x = VectorXd::Zero(m);
    std::vector<int> free;
    int code = f;
    for (int i = 0; i < m; ++i, code /= 3) {
      if (code % 3 == 0) free.push_back(i);
      if (code % 3 == 1) x(i) = lb(i);
      if (code % 3 == 2) x(i) = ub(i);
    }
    const int nf = static_cast<int>(free.size());
    if (nf > 0) {
      MatrixXd Hff(nf, nf);
      VectorXd rhs(nf);
      for (int a = 0; a < nf; ++a) {
        rhs(a) = -g(free[a]);
        for (int j = 0; j < m; ++j) {
          if (std::find(free.begin(), free.end(), j) == free.end()) rhs(a) -= H(free[a], j) * x(j);
        }
        for (int b = 0; b < nf; ++b) Hff(a, b) = H(free[a], free[b]);
      }
      const VectorXd xf = Hff.llt().solve(rhs);
      bool inside = true;
      for (int a = 0; a < nf; ++a) {
        x(free[a]) = xf(a);
        inside = inside && xf(a) >= lb(free[a]) - 1e-12 && xf(a) <= ub(free[a]) + 1e-12;
      }
      if (!inside) continue;
    }
    best = std::min(best, boxqp_objective(H, g, x));
  }
  return best;
}

TEST(BoxQp, MatchesFaceEnumerationAndSatisfiesKkt) {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> dim(1, 4);
  for (int trial = 0; trial < 200; ++trial) {
    const int m = dim(rng);
    const MatrixXd H = test::random_spd(m, rng, 0.1, 10.0);
    const VectorXd g = test::uniform(m, 5.0, rng);
    const VectorXd lb = -VectorXd::Ones(m) - test::uniform(m, 0.5, rng).cwiseAbs();
    const VectorXd ub = VectorXd::Ones(m) + test::uniform(m, 0.5, rng).cwiseAbs();
    const VectorXd u0 = test::uniform(m, 1.0, rng);
    const BoxQpResult r = solve_boxqp(H, g, lb, ub, u0);
    ASSERT_EQ(r.status, BoxQpStatus::converged) << "trial " << trial;
    EXPECT_NEAR(r.objective, brute_force_minimum(H, g, lb, ub), 1e-7) << "trial " << trial;
    const VectorXd grad = H * r.u_star + g;
    for (int i = 0; i < m; ++i) {
      EXPECT_GE(r.u_star(i), lb(i));
      EXPECT_LE(r.u_star(i), ub(i));
      if (r.free[i]) {
        EXPECT_LT(std::abs(grad(i)), 1e-8);
      } else if (r.u_star(i) <= lb(i)) {
        EXPECT_GE(grad(i), -1e-8);
      } else {
        EXPECT_LE(grad(i), 1e-8);
      }
    }
  }
}

TEST(BoxQp, LooseBoundsGiveTheNewtonPoint) {
  std::mt19937_64 rng(9);
  const MatrixXd H = test::random_spd(3, rng);
  const VectorXd g = test::uniform(3, 1.0, rng);
  const BoxQpResult r = solve_boxqp(H, g, VectorXd::Constant(3, -1e6), VectorXd::Constant(3, 1e6),
                                    VectorXd::Zero(3));
  EXPECT_EQ(r.free_count(), 3);
  EXPECT_LT((r.u_star + H.llt().solve(g)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE(r.iterations, 3);
}

TEST(BoxQp, FeedbackGainsVanishOnClampedRows) {
  MatrixXd H(2, 2);
  H << 2, 0.5, 0.5, 1;
  const VectorXd g = Eigen::Vector2d(-10.0, 0.1);
  const BoxQpResult r =
      solve_boxqp(H, g, Eigen::Vector2d(-1, -1), Eigen::Vector2d(1, 1), VectorXd::Zero(2));
  ASSERT_FALSE(r.free[0]);
  ASSERT_TRUE(r.free[1]);
  EXPECT_EQ(r.u_star(0), 1.0);
  MatrixXd Qux(2, 3);
  Qux << 1, 2, 3, 4, 5, 6;
  const MatrixXd L = feedback_gains(r, Qux);
  EXPECT_EQ(L.row(0).norm(), 0.0);
  EXPECT_LT((L.row(1) + Qux.row(1) / H(1, 1)).norm(), 1e-14);
}

TEST(BoxQp, InfeasibleInitialGuessIsProjected) {
  MatrixXd H = MatrixXd::Identity(2, 2);
  const BoxQpResult r = solve_boxqp(H, VectorXd::Zero(2), Eigen::Vector2d(-1, -1),
                                    Eigen::Vector2d(1, 1), Eigen::Vector2d(5, -5));
  EXPECT_LT(r.u_star.norm(), 1e-12);
}

TEST(BoxQp, NonPositiveDefiniteHessianIsReported) {
  MatrixXd H(2, 2);
  H << 1, 0, 0, -1;
  const BoxQpResult r = solve_boxqp(H, VectorXd::Ones(2), Eigen::Vector2d(-1, -1),
                                    Eigen::Vector2d(1, 1), VectorXd::Zero(2));
  EXPECT_EQ(r.status, BoxQpStatus::non_pd_hessian);
}

TEST(BoxQp, ObjectiveDecreasesFromTheInitialGuess) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 50; ++trial) {
    const MatrixXd H = test::random_spd(4, rng);
    const VectorXd g = test::uniform(4, 8.0, rng);
    const VectorXd lb = -VectorXd::Ones(4), ub = VectorXd::Ones(4);
    const VectorXd u0 = test::uniform(4, 1.0, rng);
    const BoxQpResult r = solve_boxqp(H, g, lb, ub, u0);
    EXPECT_LE(r.objective, boxqp_objective(H, g, u0) + 1e-14);
  }
}

}  // namespace
}  // namespace softtraj
