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
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "softtraj/integrator.hpp"
#include "softtraj/model.hpp"
#include "softtraj/rigid_models.hpp"
#include "test_util.hpp"

namespace softtraj {
namespace {

TEST(LinearModel, DerivativesAreTheSystemMatrices) {
  std::mt19937_64 rng(3);
  const MatrixXd A = MatrixXd::Random(4, 4);
  const MatrixXd B = MatrixXd::Random(4, 2);
  const LinearModel model(A, B);
  const VectorXd x = test::uniform(4, 1.0, rng);
  const VectorXd u = test::uniform(2, 1.0, rng);
  const FirstOrder d = model.jac_f(x, u);
  EXPECT_TRUE(d.f.isApprox(A * x + B * u, 1e-14));
  EXPECT_EQ(d.fx, A);
  EXPECT_EQ(d.fu, B);
  const SecondOrder h = model.hess_f(x, u, HessianMode::nested_dual);
  for (int i = 0; i < 4; ++i) {
    EXPECT_EQ(h.fxx[i].norm(), 0.0);
    EXPECT_EQ(h.fuu[i].norm(), 0.0);
    EXPECT_EQ(h.fxu[i].norm(), 0.0);
  }
}

TEST(DynamicsModel, RejectsWrongLengthsAndNonFiniteInputs) {
  const RigidCartPole model({});
  EXPECT_THROW(model.eval_f(VectorXd::Zero(3), VectorXd::Zero(1)), ConfigError);
  EXPECT_THROW(model.jac_f(VectorXd::Zero(4), VectorXd::Zero(2)), ConfigError);
  VectorXd x = VectorXd::Zero(4);
  x(2) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(model.eval_f(x, VectorXd::Zero(1)), InputError);
}

TEST(RigidCartPole, HangingRestIsAnEquilibrium) {
  const RigidCartPole model({});
  EXPECT_EQ(model.eval_f(VectorXd::Zero(4), VectorXd::Zero(1)).norm(), 0.0);
  VectorXd up = VectorXd::Zero(4);
  up(1) = M_PI;
  EXPECT_LT(model.eval_f(up, VectorXd::Zero(1)).norm(), 1e-14);
}

TEST(RigidCartPole, ForceAcceleratesCartAtRestAsClosedForm) {
  // At theta = 0 the pole hangs: M = [[mc+mp, mp lc], [mp lc, I + mp lc^2]].
  RigidCartPoleParams p;
  p.pole_mass = 0.7;
  const RigidCartPole model(p);
  const double lc = 0.5 * p.pole_length;
  Eigen::Matrix2d M;
  M << p.cart_mass + p.pole_mass, p.pole_mass * lc, p.pole_mass * lc,
      p.inertia_about_com() + p.pole_mass * lc * lc;
  const Eigen::Vector2d acc = M.inverse() * Eigen::Vector2d(3.0, 0.0);
  const VectorXd f = model.eval_f(VectorXd::Zero(4), VectorXd::Constant(1, 3.0));
  EXPECT_NEAR(f(2), acc(0), 1e-14);
  EXPECT_NEAR(f(3), acc(1), 1e-14);
}

TEST(RigidModels, DerivativeCheckPasses) {
  const RigidCartPole cartpole({});
  RigidPendubotParams pp;
  pp.damping1 = 0.1;
  const RigidPendubot pendubot(pp);
  DerivativeCheckOptions opt;
  opt.samples = 40;
  opt.x_range = VectorXd::Constant(1, 3.0);
  opt.u_range = VectorXd::Constant(1, 20.0);
  for (const DynamicsModel* m : {static_cast<const DynamicsModel*>(&cartpole),
                                 static_cast<const DynamicsModel*>(&pendubot)}) {
    const DerivativeCheckReport r = check_derivatives(*m, opt);
    EXPECT_EQ(r.samples, 40);
    EXPECT_TRUE(r.hessian_checked);
    EXPECT_LT(r.max_jacobian_error, 1e-6) << m->name();
    EXPECT_LT(r.max_hessian_error, 1e-5) << m->name();
  }
}

TEST(RigidModels, FiniteDifferenceHessianAgreesWithNestedDual) {
  const RigidPendubot model({});
  std::mt19937_64 rng(11);
  const VectorXd x = test::uniform(4, 2.0, rng);
  const VectorXd u = test::uniform(1, 5.0, rng);
  const SecondOrder exact = model.hess_f(x, u, HessianMode::nested_dual);
  const SecondOrder fd = model.hess_f(x, u, HessianMode::finite_difference);
  for (int i = 0; i < 4; ++i) {
    EXPECT_LT((exact.fxx[i] - fd.fxx[i]).cwiseAbs().maxCoeff(), 1e-5);
    EXPECT_LT((exact.fxu[i] - fd.fxu[i]).cwiseAbs().maxCoeff(), 1e-5);
    EXPECT_LT((exact.fxx[i] - exact.fxx[i].transpose()).norm(), 1e-14);
  }
}

TEST(RigidModels, DerivativeCheckFlagsABrokenJacobian) {
  // A model whose hand-written Jacobian is off by a sign must be caught.
  class Broken : public DynamicsModel {
   public:
    std::string name() const override { return "broken"; }
    int state_dim() const override { return 2; }
    int control_dim() const override { return 1; }
    VectorXd eval_f(const VectorXd& x, const VectorXd& u) const override {
      return Eigen::Vector2d(x(1), -std::sin(x(0)) + u(0));
    }
    FirstOrder jac_f(const VectorXd& x, const VectorXd& u) const override {
      FirstOrder d{eval_f(x, u), MatrixXd(2, 2), MatrixXd(2, 1)};
      d.fx << 0, 1, std::cos(x(0)), 0;
      d.fu << 0, 1;
      return d;
    }
  };
  const Broken model;
  DerivativeCheckOptions opt;
  opt.samples = 10;
  const DerivativeCheckReport r = check_derivatives(model, opt);
  EXPECT_FALSE(r.hessian_checked);
  EXPECT_GT(r.max_jacobian_error, 0.1);
  EXPECT_EQ(r.worst_row, 1);
  EXPECT_EQ(r.worst_col, 0);
  EXPECT_THROW(model.hess_f(VectorXd::Zero(2), VectorXd::Zero(1), HessianMode::nested_dual),
               UnsupportedOperation);
}

TEST(RigidModels, UndampedEnergyIsConservedUnderRk4) {
  VectorXd x0(4);
  x0 << 0.3, 2.0, 0.5, -1.0;
  auto drift = [&](const auto& model) {
    VectorXd s = x0;
    const double e0 = model.energy(s);
    for (int k = 0; k < 2000; ++k) s = rk4_step(model, s, VectorXd::Zero(1), 1e-3);
    return std::abs(model.energy(s) - e0) / std::abs(e0);
  };
  EXPECT_LT(drift(RigidPendubot({})), 1e-8);
  EXPECT_LT(drift(RigidCartPole({})), 1e-8);
}

TEST(RigidModels, ParameterValidation) {
  RigidCartPoleParams p;
  p.pole_mass = -1.0;
  EXPECT_THROW(RigidCartPole{p}, ConfigError);
  RigidPendubotParams q;
  q.length2 = 0.0;
  EXPECT_THROW(RigidPendubot{q}, ConfigError);
}

}  // namespace
}  // namespace softtraj
