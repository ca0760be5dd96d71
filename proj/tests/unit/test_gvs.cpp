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

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "softtraj/gvs.hpp"
#include "softtraj/integrator.hpp"
#include "softtraj/rigid_models.hpp"
#include "softtraj/warmstart.hpp"
#include "test_util.hpp"

namespace softtraj {
namespace {

TEST(ChainLayout, PresetDofCounts) {
  EXPECT_EQ(soft_cartpole_layout().n(), 11);
  EXPECT_EQ(soft_cartpole_layout().m(), 1);
  EXPECT_EQ(soft_pendubot_layout().n(), 20);
  EXPECT_EQ(soft_pendubot_layout().m(), 1);
  EXPECT_EQ(soft_cartpole_layout(StrainBasis::rigid()).n(), 2);
  EXPECT_EQ(soft_cartpole_layout(StrainBasis::curvature_only(0)).n(), 3);
  EXPECT_EQ(soft_cartpole_layout(StrainBasis::curvature_only(2)).n(), 5);
  EXPECT_EQ(soft_pendubot_layout(StrainBasis::rigid()).n(), 2);
}

TEST(ChainLayout, CoordinateNamesFollowChainOrder) {
  const std::vector<std::string> names =
      soft_cartpole_layout(StrainBasis{{1, 0, -1}}).coordinate_names();
  const std::vector<std::string> expected{"d", "theta", "link0.kappa0", "link0.kappa1",
                                          "link0.stretch0"};
  EXPECT_EQ(names, expected);
  EXPECT_EQ(soft_pendubot_layout().joint_coordinates(), (std::vector<int>{0, 10}));
}

TEST(ChainLayout, ValidationRejectsBadLayouts) {
  ChainLayout empty;
  EXPECT_THROW(empty.validate(), ConfigError);
  SoftLinkParams rod;
  rod.youngs_modulus = -1.0;
  EXPECT_THROW(soft_cartpole_layout(StrainBasis::full(2), rod), ConfigError);
  EXPECT_THROW(StrainBasis({-2, 0, 0}).validate(), ConfigError);
  ChainLayout coarse = soft_cartpole_layout();
  std::get<SoftLink>(coarse.elements[2]).quadrature_order = 2;
  EXPECT_THROW(GvsModel{coarse}, ConfigError);
}

TEST(GvsModel, RigidBasisReproducesClosedFormCartPole) {
  const SoftLinkParams rod;
  const GvsModel gvs(soft_cartpole_layout(StrainBasis::rigid(), rod, 1.3, 0.05));
  const RigidCartPole oracle(test::rigid_equivalent(rod, 1.3, 0.05));
  std::mt19937_64 rng(5);
  for (int s = 0; s < 25; ++s) {
    const VectorXd x = test::uniform(4, 3.0, rng);
    const VectorXd u = test::uniform(1, 50.0, rng);
    const VectorXd a = gvs.eval_f(x, u);
    const VectorXd b = oracle.eval_f(x, u);
    EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-10 * std::max(1.0, b.cwiseAbs().maxCoeff()));
  }
}

TEST(GvsModel, MassMatrixSymmetricPositiveDefinite) {
  const GvsModel model(soft_pendubot_layout());
  std::mt19937_64 rng(8);
  for (int s = 0; s < 10; ++s) {
    VectorXd q = test::uniform(20, 0.05, rng);
    q(0) = test::uniform(1, 3.0, rng)(0);
    q(10) = test::uniform(1, 3.0, rng)(0);
    const Assembly<double> a = assemble_dynamics(model, q, VectorXd::Zero(20));
    EXPECT_LT((a.M - a.M.transpose()).cwiseAbs().maxCoeff(), 1e-12 * a.M.norm());
    const Eigen::SelfAdjointEigenSolver<MatrixXd> es(a.M);
    EXPECT_GT(es.eigenvalues().minCoeff(), 0.0);
  }
}

TEST(GvsModel, StiffnessMatchesLegendreIntegrals) {
  // K_kk = (E I, E A, G A) * L / (2k + 1); off-diagonals vanish by orthogonality.
  const SoftLinkParams p;
  const GvsModel model(soft_cartpole_layout(StrainBasis::full(2), p));
  const MatrixXd& K = model.link_stiffness(0);
  ASSERT_EQ(K.rows(), 9);
  const double mode_stiffness[] = {p.youngs_modulus * p.second_moment(),
                                   p.youngs_modulus * p.area(),
                                   p.shear_modulus() * p.area()};
  for (int mode = 0; mode < 3; ++mode) {
    for (int k = 0; k < 3; ++k) {
      const int i = 3 * mode + k;
      EXPECT_NEAR(K(i, i), mode_stiffness[mode] * p.length / (2 * k + 1),
                  1e-12 * K(i, i));
    }
  }
  EXPECT_LT((K - MatrixXd(K.diagonal().asDiagonal())).cwiseAbs().maxCoeff(),
            1e-12 * K.cwiseAbs().maxCoeff());
}

TEST(GvsModel, StrainFieldAndMeanStrain) {
  const GvsModel model(soft_cartpole_layout());
  VectorXd q = VectorXd::Zero(11);
  const Vector3d rest = model.strain_field(0, q, 0.3);
  EXPECT_EQ(rest, Vector3d(0.0, 1.0, 0.0));
  q.segment(2, 9) << 0.5, 0.2, -0.1, 0.01, 0.02, 0.03, -0.02, 0.0, 0.04;
  for (double s : {0.0, 0.25, 0.9}) {
    const Vector3d xi = model.strain_field(0, q, s);
    const double p1 = 2 * s - 1, p2 = 6 * s * s - 6 * s + 1;
    EXPECT_NEAR(xi(0), 0.5 + 0.2 * p1 - 0.1 * p2, 1e-14);
    EXPECT_NEAR(xi(1), 1.0 + 0.01 + 0.02 * p1 + 0.03 * p2, 1e-14);
    EXPECT_NEAR(xi(2), -0.02 + 0.04 * p2, 1e-14);
  }
  // Higher Legendre terms average to zero over the rod.
  const Vector3d mean = model.mean_strain(q)[0];
  EXPECT_NEAR(mean(0), 0.5, 1e-13);
  EXPECT_NEAR(mean(1), 1.01, 1e-13);
  EXPECT_NEAR(mean(2), -0.02, 1e-13);
}

TEST(GvsModel, ConstantCurvatureRodIsACircularArc) {
  const ChainLayout layout = test::soft_pendulum_layout(StrainBasis::curvature_only(0));
  const GvsModel model(layout);
  const double theta = 0.4, kappa = 1.7;
  const VectorXd q = Eigen::Vector2d(theta, kappa);
  const auto poses = model.forward_kinematics(q, {{0.0, 0.35, 1.0}});
  const double phi0 = layout.base_angle + theta;
  for (const auto& [s, pose] : {std::pair{0.0, poses[0][0]}, std::pair{0.35, poses[0][1]},
                                std::pair{1.0, poses[0][2]}}) {
    const double phi = phi0 + kappa * s;
    EXPECT_NEAR(pose.angle, phi, 1e-12);
    EXPECT_NEAR(pose.x, (std::sin(phi) - std::sin(phi0)) / kappa, 1e-12);
    EXPECT_NEAR(pose.y, -(std::cos(phi) - std::cos(phi0)) / kappa, 1e-12);
  }
}

TEST(GvsModel, HangingRodStretchesUnderItsOwnWeight) {
  // Axial strain of a hanging rod: rho g (L - s) / E, linear in s and hence
  // exact in an order-2 basis.
  const SoftLinkParams p;
  const GvsModel model(soft_cartpole_layout(StrainBasis::full(2), p));
  const VectorXd q = static_equilibrium(model, Eigen::Vector2d(0.0, 0.0));
  for (double s : {0.0, 0.4, 1.0}) {
    const Vector3d xi = model.strain_field(0, q, s);
    EXPECT_NEAR(xi(0), 0.0, 1e-10);
    EXPECT_NEAR(xi(1) - 1.0, p.density * 9.81 * p.length * (1.0 - s) / p.youngs_modulus, 1e-10);
    EXPECT_NEAR(xi(2), 0.0, 1e-10);
  }
  EXPECT_NEAR(model.mean_strain(q)[0](1), 1.0 + p.density * 9.81 * p.length / (2.0 * p.youngs_modulus),
              1e-10);
  const VectorXd h = assemble_dynamics(model, q, VectorXd::Zero(11)).h;
  EXPECT_LT(h.tail(9).cwiseAbs().maxCoeff(), 1e-9);
}

double energy_drift(const GvsModel& model, VectorXd x, double h, int steps,
                    bool check_monotone, bool& monotone) {
  const int n = model.layout().n();
  auto energy = [&](const VectorXd& s) { return model.energies(s.head(n), s.tail(n)).total(); };
  const double e0 = energy(x);
  double prev = e0;
  monotone = true;
  for (int k = 0; k < steps; ++k) {
    x = rk4_step(model, x, VectorXd::Zero(model.control_dim()), h);
    const double e = energy(x);
    if (check_monotone && e > prev + 1e-12 * std::abs(prev)) monotone = false;
    prev = e;
  }
  return std::abs(prev - e0) / std::abs(e0);
}

TEST(GvsModel, UndampedSoftPendulumConservesEnergy) {
  const GvsModel model(test::soft_pendulum_layout(StrainBasis::curvature_only(2)));
  VectorXd x = VectorXd::Zero(8);
  x(0) = 1.0;
  x(1) = 0.3;
  x(4) = 0.5;
  bool monotone = false;
  EXPECT_LT(energy_drift(model, x, 1e-4, 2000, false, monotone), 1e-7);
}

TEST(GvsModel, DampedSoftPendulumDissipates) {
  const GvsModel model(test::soft_pendulum_layout(StrainBasis::full(1), 0.05, 1.0e4));
  VectorXd x = VectorXd::Zero(14);
  x(0) = 1.0;
  x(1) = 0.3;
  x(7) = 0.5;
  bool monotone = false;
  energy_drift(model, x, 1e-4, 2000, true, monotone);
  EXPECT_TRUE(monotone);
}

TEST(GvsModel, SoftCartPoleDerivativeCheck) {
  const GvsModel model(soft_cartpole_layout(StrainBasis::full(1)));
  DerivativeCheckOptions opt;
  opt.samples = 8;
  // n = 8: d, theta, two coefficients per strain mode.
  VectorXd xr(16);
  xr << 1, 3, 1, 1, 0.05, 0.05, 0.05, 0.05, 1, 2, 1, 1, 0.1, 0.1, 0.1, 0.1;
  opt.x_range = xr;
  opt.u_range = VectorXd::Constant(1, 50.0);
  const DerivativeCheckReport r = check_derivatives(model, opt);
  EXPECT_LT(r.max_jacobian_error, 1e-5);
  EXPECT_LT(r.max_hessian_error, 1e-4);
}

TEST(GvsModel, ControlEntersThroughTheActuatedJoint) {
  const GvsModel model(soft_pendubot_layout());
  const Assembly<double> a = assemble_dynamics(model, VectorXd::Zero(20), VectorXd::Zero(20));
  ASSERT_EQ(a.B.cols(), 1);
  EXPECT_EQ(a.B(0, 0), 1.0);
  EXPECT_EQ(a.B.col(0).tail(19).norm(), 0.0);
}

}  // namespace
}  // namespace softtraj
