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
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <gtest/gtest.h>

#include "softtraj/box_iddp.hpp"
#include "softtraj/gvs.hpp"
#include "softtraj/linalg.hpp"
#include "softtraj/warmstart.hpp"

namespace softtraj {
namespace {

// Two carts joined by a spring, force on the first one.
std::shared_ptr<LinearModel> two_carts() {
  MatrixXd A = MatrixXd::Zero(4, 4);
  A.topRightCorner(2, 2).setIdentity();
  A.bottomLeftCorner(2, 2) << -2.0, 2.0, 2.0, -2.0;
  A.bottomRightCorner(2, 2) = -0.1 * MatrixXd::Identity(2, 2);
  MatrixXd B = MatrixXd::Zero(4, 1);
  B(2, 0) = 1.0;
  return std::make_shared<LinearModel>(A, B, true);
}

OcpProblem lqr_problem(double u_max) {
  QuadraticCost c = QuadraticCost::diagonal(VectorXd::Ones(4), VectorXd::Constant(1, 0.1),
                                            VectorXd::Constant(4, 10.0), VectorXd::Zero(4));
  return OcpProblem::make(c, ControlBounds::symmetric(1, u_max),
                          Eigen::Vector4d(1.0, -0.5, 0.0, 0.3), 1.0, 50);
}

struct Riccati {
  std::vector<MatrixXd> K;
  double cost = 0.0;
};

// Backward Riccati recursion on x+ = Ad x + Bd u with h-weighted stage cost.
Riccati riccati(const LinearModel& m, const OcpProblem& p) {
  const MatrixXd I = MatrixXd::Identity(4, 4);
  const Eigen::PartialPivLU<MatrixXd> lu(I - p.h * m.A());
  const MatrixXd Ad = lu.solve(I);
  const MatrixXd Bd = lu.solve(p.h * m.B());
  MatrixXd P = p.cost.Qf;
  Riccati out;
  out.K.resize(p.N);
  for (int k = p.N - 1; k >= 0; --k) {
    const MatrixXd S = p.h * p.cost.R + Bd.transpose() * P * Bd;
    out.K[k] = S.ldlt().solve(Bd.transpose() * P * Ad);
    P = p.h * p.cost.Q + Ad.transpose() * P * (Ad - Bd * out.K[k]);
  }
  out.cost = 0.5 * p.x0.dot(P * p.x0);
  return out;
}

TEST(BoxIddp, LooseBoundsReproduceRiccati) {
  const auto model = two_carts();
  const OcpProblem p = lqr_problem(1e4);
  const Riccati oracle = riccati(*model, p);
  for (IddpHessian mode : {IddpHessian::gauss_newton, IddpHessian::full_second_order}) {
    BoxIddpSettings s;
    s.hessian_mode = mode;
    s.reg_init = 0.0;  // the Riccati oracle has no input-space regularization
    const BoxIddpResult r = solve_box_iddp(p, *model, std::vector<VectorXd>(50, VectorXd::Zero(1)), s);
    EXPECT_EQ(r.trace.status, SolverStatus::converged);
    EXPECT_LE(r.trace.size(), 3u);
    EXPECT_LT(relative_error(r.policy.total_cost, oracle.cost, 1e-300), 1e-8);
    for (int k = 0; k < p.N; ++k) {
      EXPECT_LT((r.policy.gains[k] + oracle.K[k]).cwiseAbs().maxCoeff(), 1e-6) << k;
      const VectorXd dx = Eigen::Vector4d(0.01, -0.02, 0.03, 0.0);
      const VectorXd u = apply_feedback(r.policy, k, r.policy.xs[k] + dx);
      EXPECT_NEAR(u(0), r.policy.us[k](0) - (oracle.K[k] * dx)(0), 1e-8);
    }
  }
}

TEST(BoxIddp, ConvergedControlsAreAFixedPoint) {
  const auto model = two_carts();
  const OcpProblem p = lqr_problem(1e4);
  const BoxIddpResult first = solve_box_iddp(p, *model, std::vector<VectorXd>(50, VectorXd::Zero(1)));
  const BoxIddpResult again = solve_box_iddp(p, *model, first.policy.us);
  ASSERT_EQ(again.trace.size(), 1u);
  EXPECT_FALSE(again.trace.back().accepted);
  EXPECT_EQ(again.trace.status, SolverStatus::converged);
  for (int k = 0; k < p.N; ++k) EXPECT_LT((again.policy.us[k] - first.policy.us[k]).norm(), 1e-9);
}

TEST(BoxIddp, TightBoundsAreRespected) {
  const auto model = two_carts();
  const OcpProblem loose = lqr_problem(1e4);
  const OcpProblem tight = lqr_problem(0.5);
  const BoxIddpResult r = solve_box_iddp(tight, *model, std::vector<VectorXd>(50, VectorXd::Zero(1)));
  int clamped = 0;
  for (const VectorXd& u : r.policy.us) {
    EXPECT_LE(std::abs(u(0)), 0.5);
    if (std::abs(u(0)) == 0.5) ++clamped;
  }
  EXPECT_GT(clamped, 0);
  EXPECT_GT(r.policy.total_cost, riccati(*model, loose).cost);
  // Clamped knots carry no feedback.
  for (int k = 0; k < tight.N; ++k) {
    if (std::abs(r.policy.us[k](0)) == 0.5) {
      EXPECT_EQ(r.policy.gains[k].norm(), 0.0);
    }
  }
}

OcpProblem rigid_swing_up(const GvsModel& model) {
  SwingUpSpec spec = default_cartpole_swingup();
  return spec.build(model);
}

TEST(BoxIddp, AcceptedCostsNeverIncrease) {
  const GvsModel model(soft_cartpole_layout(StrainBasis::rigid()));
  const OcpProblem p = rigid_swing_up(model);
  BoxIddpSettings s;
  s.max_iters = 40;
  const BoxIddpResult r = solve_box_iddp(p, model, std::vector<VectorXd>(p.N, VectorXd::Zero(1)), s);
  double prev = std::numeric_limits<double>::infinity();
  for (const IterationRecord& rec : r.trace.iterations()) {
    if (!rec.accepted) continue;
    EXPECT_LE(rec.cost, prev);
    prev = rec.cost;
  }
  EXPECT_LT(prev, trajectory_cost(p, rollout(model, p.x0, std::vector<VectorXd>(p.N, VectorXd::Zero(1)), {}),
                                  std::vector<VectorXd>(p.N, VectorXd::Zero(1)),
                                  Quadrature::left_rectangle));
  for (const VectorXd& u : r.policy.us) EXPECT_TRUE(p.bounds.contains(u));
}

TEST(BoxIddp, ParallelLineSearchMatchesSerial) {
  const GvsModel model(soft_cartpole_layout(StrainBasis::rigid()));
  const OcpProblem p = rigid_swing_up(model);
  BoxIddpSettings s;
  s.max_iters = 15;
  const std::vector<VectorXd> u0(p.N, VectorXd::Zero(1));
  const BoxIddpResult serial = solve_box_iddp(p, model, u0, s);
  s.parallel_line_search = true;
  const BoxIddpResult parallel = solve_box_iddp(p, model, u0, s);
  ASSERT_EQ(serial.trace.size(), parallel.trace.size());
  for (std::size_t i = 0; i < serial.trace.size(); ++i) {
    EXPECT_EQ(serial.trace.iterations()[i].cost, parallel.trace.iterations()[i].cost);
    EXPECT_EQ(serial.trace.iterations()[i].alpha, parallel.trace.iterations()[i].alpha);
  }
}

TEST(BoxIddp, BackwardPassPredictsDescent) {
  const auto model = two_carts();
  const OcpProblem p = lqr_problem(1e4);
  const std::vector<VectorXd> us(50, VectorXd::Zero(1));
  ImplicitStepSettings step;
  step.h = p.h;
  const std::vector<VectorXd> xs = rollout(*model, p.x0, us, step);
  const BackwardPassResult bp = backward_pass(p, *model, xs, us, 0.0, {});
  ASSERT_TRUE(bp.success);
  EXPECT_LT(bp.expected_change(1.0), 0.0);
  const ForwardPassResult fp = forward_pass(p, *model, xs, us, bp.ffs, bp.gains, 1.0, step);
  ASSERT_TRUE(fp.success);
  // Exact model: the full step achieves exactly the predicted change.
  const double before = trajectory_cost(p, xs, us, Quadrature::left_rectangle);
  EXPECT_NEAR(fp.cost - before, bp.expected_change(1.0), 1e-9 * before);
}

TEST(BoxIddpSettings, Validation) {
  BoxIddpSettings s;
  s.reg_scale = 1.0;
  EXPECT_THROW(s.validate(), ConfigError);
  s = {};
  s.alphas.clear();
  EXPECT_THROW(s.validate(), ConfigError);
  s = {};
  s.max_iters = -1;
  EXPECT_THROW(s.validate(), ConfigError);
}

}  // namespace
}  // namespace softtraj
