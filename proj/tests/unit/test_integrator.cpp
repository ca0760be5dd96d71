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
#include <random>

#include <Eigen/LU>
#include <gtest/gtest.h>

#include "softtraj/gvs.hpp"
#include "softtraj/integrator.hpp"
#include "softtraj/rigid_models.hpp"
#include "test_util.hpp"

namespace softtraj {
namespace {

TEST(ImplicitStep, LinearModelSolvesInOneNewtonIteration) {
  MatrixXd A(2, 2);
  A << 0, 1, -4, -0.3;
  MatrixXd B(2, 1);
  B << 0, 1;
  const LinearModel model(A, B, true);
  const VectorXd x = Eigen::Vector2d(0.7, -0.2);
  const VectorXd u = VectorXd::Constant(1, 1.5);
  ImplicitStepSettings s;
  s.h = 0.05;
  const StepResult r = implicit_step(model, x, u, s);
  const MatrixXd I = MatrixXd::Identity(2, 2);
  const VectorXd expected = (I - s.h * A).lu().solve(x + s.h * B * u);
  EXPECT_EQ(r.newton_iters, 1);
  EXPECT_LT((r.xp - expected).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LT(residual(model, x, r.xp, u, s.h).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(ImplicitStep, ResidualBelowToleranceOnSoftModel) {
  const GvsModel model(soft_cartpole_layout(StrainBasis::curvature_only(2)));
  VectorXd x = VectorXd::Zero(10);
  x(1) = 0.5;
  x(6) = 4.0;
  ImplicitStepSettings s;
  const StepResult r = implicit_step(model, x, VectorXd::Constant(1, 30.0), s);
  EXPECT_LT(r.residual_norm, s.newton_tol);
  EXPECT_LT(residual(model, x, r.xp, VectorXd::Constant(1, 30.0), s.h).lpNorm<Eigen::Infinity>(),
            s.newton_tol);
}

TEST(ImplicitStep, ChordStepConvergesToTheSamePoint) {
  const RigidCartPole model({});
  ImplicitStepSettings s;
  VectorXd x(4);
  x << 0.1, 2.0, 0.5, 3.0;
  const VectorXd u = VectorXd::Constant(1, 20.0);
  const StepResult exact = implicit_step(model, x, u, s);
  const ResidualDerivatives rd = residual_derivatives(model, x, x, u, s.h);
  const Eigen::PartialPivLU<MatrixXd> lu(rd.g_xp);
  const StepResult chord = implicit_step_chord(model, x, u, s, x, lu);
  EXPECT_LT((chord.xp - exact.xp).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(ResidualDerivatives, StructureOfTheImplicitEulerResidual) {
  const GvsModel model(soft_cartpole_layout(StrainBasis::curvature_only(1)));
  std::mt19937_64 rng(2);
  const VectorXd x = test::uniform(8, 0.5, rng);
  const VectorXd xp = test::uniform(8, 0.5, rng);
  const VectorXd u = test::uniform(1, 10.0, rng);
  const double h = 0.01;
  const ResidualDerivatives rd = residual_derivatives(model, x, xp, u, h, 2);
  EXPECT_EQ(rd.g_x, -MatrixXd::Identity(8, 8));
  const FirstOrder f = model.jac_f(xp, u);
  EXPECT_LT((rd.g_xp - (MatrixXd::Identity(8, 8) - h * f.fx)).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT((rd.g_u + h * f.fu).cwiseAbs().maxCoeff(), 1e-15);
  // Velocity rows of f do not depend on u for a mechanical model's q rows.
  EXPECT_EQ(rd.g_u.topRows(4).norm(), 0.0);
  ASSERT_EQ(rd.g_xpxp.size(), 8u);
  for (int a = 0; a < 4; ++a) {
    EXPECT_EQ(rd.g_xpxp[a].norm(), 0.0);
    EXPECT_EQ(rd.g_uu[a].norm(), 0.0);
    EXPECT_EQ(rd.g_xpu[a].norm(), 0.0);
  }
}

TEST(DiscreteJacobians, MatchFiniteDifferencesOfTheStepMap) {
  const GvsModel model(soft_cartpole_layout(StrainBasis::curvature_only(0)));
  ImplicitStepSettings s;
  s.newton_tol = 1e-13;
  std::mt19937_64 rng(4);
  for (int k = 0; k < 5; ++k) {
    VectorXd x = test::uniform(6, 1.0, rng);
    x(1) *= 3.0;
    const VectorXd u = test::uniform(1, 40.0, rng);
    const StepResult r = implicit_step(model, x, u, s);
    const DiscreteJacobians J =
        discrete_jacobians(residual_derivatives(model, x, r.xp, u, s.h));
    const DiscreteJacobians fd = test::fd_step_map(model, x, u, s);
    EXPECT_LT(relative_error(J.fx, fd.fx), 1e-6);
    EXPECT_LT(relative_error(J.fu, fd.fu), 1e-6);
  }
}

TEST(DiscreteHessians, MatchFiniteDifferencesOfDiscreteJacobians) {
  const RigidCartPole model({});
  ImplicitStepSettings s;
  s.newton_tol = 1e-13;
  VectorXd x(4);
  x << 0.2, 1.1, -0.4, 2.0;
  const VectorXd u = VectorXd::Constant(1, 15.0);
  auto jacobians_at = [&](const VectorXd& xx, const VectorXd& uu) {
    const StepResult r = implicit_step(model, xx, uu, s);
    return discrete_jacobians(residual_derivatives(model, xx, r.xp, uu, s.h));
  };
  const StepResult r = implicit_step(model, x, u, s);
  const ResidualDerivatives rd = residual_derivatives(model, x, r.xp, u, s.h, 2);
  const DiscreteHessians H = discrete_hessians(rd, discrete_jacobians(rd));
  const double eps = 1e-5;
  for (int j = 0; j < 4; ++j) {
    VectorXd xp = x, xm = x;
    xp(j) += eps;
    xm(j) -= eps;
    const MatrixXd dfx = (jacobians_at(xp, u).fx - jacobians_at(xm, u).fx) / (2 * eps);
    const MatrixXd dfu = (jacobians_at(xp, u).fu - jacobians_at(xm, u).fu) / (2 * eps);
    for (int i = 0; i < 4; ++i) {
      EXPECT_LT((H.Fxx[i].col(j) - dfx.row(i).transpose()).cwiseAbs().maxCoeff(), 1e-6);
      EXPECT_LT(std::abs(H.Fxu[i](j, 0) - dfu(i, 0)), 1e-6);
    }
  }
  VectorXd up = u, um = u;
  up(0) += eps;
  um(0) -= eps;
  const MatrixXd dfu = (jacobians_at(x, up).fu - jacobians_at(x, um).fu) / (2 * eps);
  for (int i = 0; i < 4; ++i) EXPECT_LT(std::abs(H.Fuu[i](0, 0) - dfu(i, 0)), 1e-6);
}

TEST(Rk4, MatchesFourthOrderTaylorPolynomialOnLinearModel) {
  MatrixXd A(3, 3);
  A << -1, 2, 0, 0, -0.5, 1, 0.3, 0, -2;
  const LinearModel model(A, MatrixXd::Zero(3, 1));
  const VectorXd x = Eigen::Vector3d(1.0, -2.0, 0.5);
  const double h = 0.1;
  const MatrixXd hA = h * A;
  const MatrixXd I = MatrixXd::Identity(3, 3);
  const MatrixXd T = I + hA + hA * hA / 2.0 + hA * hA * hA / 6.0 + hA * hA * hA * hA / 24.0;
  EXPECT_LT((rk4_step(model, x, VectorXd::Zero(1), h) - T * x).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Rollout, ProducesNPlusOneStatesAndReportsTheFailingStep) {
  const RigidCartPole model({});
  ImplicitStepSettings s;
  const std::vector<VectorXd> us(20, VectorXd::Constant(1, 5.0));
  const std::vector<VectorXd> xs = rollout(model, VectorXd::Zero(4), us, s);
  EXPECT_EQ(xs.size(), 21u);
  EXPECT_EQ(xs[0], VectorXd::Zero(4));

  ImplicitStepSettings starved = s;
  starved.max_newton_iters = 1;
  starved.newton_tol = 1e-300;
  try {
    rollout(model, VectorXd::Zero(4), us, starved);
    FAIL() << "expected IntegrationError";
  } catch (const IntegrationError& e) {
    EXPECT_EQ(e.step(), 0);
    EXPECT_GT(e.residual_norm(), 0.0);
  }
}

TEST(ImplicitStepSettings, Validation) {
  ImplicitStepSettings s;
  s.h = 0.0;
  EXPECT_THROW(s.validate(), ConfigError);
  s.h = 0.01;
  s.max_newton_iters = 0;
  EXPECT_THROW(s.validate(), ConfigError);
}

}  // namespace
}  // namespace softtraj
