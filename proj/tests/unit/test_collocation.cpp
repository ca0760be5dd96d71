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

#include "softtraj/collocation.hpp"
#include "softtraj/gvs.hpp"
#include "test_util.hpp"

namespace softtraj {
namespace {

std::shared_ptr<LinearModel> oscillator() {
  MatrixXd A(2, 2);
  A << 0, 1, -3, -0.2;
  MatrixXd B(2, 1);
  B << 0, 1;
  return std::make_shared<LinearModel>(A, B, true);
}

OcpProblem lq_problem(int N, double u_max) {
  QuadraticCost c = QuadraticCost::diagonal(Eigen::Vector2d(1.0, 0.1), VectorXd::Constant(1, 0.05),
                                            Eigen::Vector2d(20.0, 2.0), VectorXd::Zero(2));
  return OcpProblem::make(c, ControlBounds::symmetric(1, u_max), Eigen::Vector2d(1.0, 0.0), 2.0, N);
}

TEST(Transcription, PackUnpackAndBounds) {
  const OcpProblem p = lq_problem(5, 2.0);
  const Transcription tr(p);
  EXPECT_EQ(tr.dim(), 2 * 6 + 5);
  EXPECT_EQ(tr.defect_count(), 10);
  EXPECT_EQ(tr.u_offset(5), tr.u_offset(4));
  std::mt19937_64 rng(1);
  std::vector<VectorXd> xs, us;
  for (int k = 0; k <= 5; ++k) xs.push_back(test::uniform(2, 1.0, rng));
  for (int k = 0; k < 5; ++k) us.push_back(test::uniform(1, 1.0, rng));
  std::vector<VectorXd> xs2, us2;
  tr.unpack(tr.pack(xs, us), xs2, us2);
  for (int k = 0; k <= 5; ++k) EXPECT_EQ(xs[k], xs2[k]);
  for (int k = 0; k < 5; ++k) EXPECT_EQ(us[k], us2[k]);
  EXPECT_EQ(tr.lower().head(2), p.x0);
  EXPECT_EQ(tr.upper().head(2), p.x0);
  const VectorXd z = tr.project(VectorXd::Constant(tr.dim(), 5.0));
  EXPECT_EQ(z.head(2), p.x0);
  EXPECT_EQ(z(tr.u_offset(0)), 2.0);
  EXPECT_EQ(z(tr.x_offset(3)), 5.0);
}

TEST(Transcription, CostIsTheTrapezoidTrajectoryCost) {
  const OcpProblem p = lq_problem(6, 2.0);
  const Transcription tr(p);
  std::mt19937_64 rng(2);
  std::vector<VectorXd> xs, us;
  for (int k = 0; k <= 6; ++k) xs.push_back(test::uniform(2, 1.0, rng));
  for (int k = 0; k < 6; ++k) us.push_back(test::uniform(1, 1.0, rng));
  EXPECT_NEAR(transcription_cost(tr, tr.pack(xs, us)),
              trajectory_cost(p, xs, us, Quadrature::trapezoid), 1e-14);
}

TEST(Defects, JacobianMatchesFiniteDifferences) {
  const GvsModel model(soft_cartpole_layout(StrainBasis::curvature_only(1)));
  QuadraticCost c = QuadraticCost::diagonal(VectorXd::Ones(8), VectorXd::Ones(1), VectorXd::Ones(8),
                                            VectorXd::Zero(8));
  const OcpProblem p = OcpProblem::make(c, ControlBounds::symmetric(1, 100.0), VectorXd::Zero(8), 0.1, 4);
  const Transcription tr(p);
  std::mt19937_64 rng(6);
  VectorXd z = test::uniform(tr.dim(), 0.3, rng);
  const MatrixXd J = MatrixXd(defect_jacobian(tr, model, z));
  MatrixXd fd(J.rows(), J.cols());
  const double eps = 1e-6;
  for (Eigen::Index j = 0; j < tr.dim(); ++j) {
    VectorXd zp = z, zm = z;
    zp(j) += eps;
    zm(j) -= eps;
    fd.col(j) = (defects(tr, model, zp) - defects(tr, model, zm)) / (2 * eps);
  }
  EXPECT_LT(relative_error(J, fd), 1e-6);
}

// Trapezoid LQ problem solved as a dense equality-constrained QP.
struct KktSolution {
  VectorXd z;
  double cost;
};

KktSolution solve_kkt(const LinearModel& m, const OcpProblem& p) {
  const Transcription tr(p);
  const int nx = 2, N = p.N;
  const double h = p.h;
  const Eigen::Index nz = tr.dim();
  MatrixXd H = MatrixXd::Zero(nz, nz);
  for (int k = 0; k <= N; ++k) {
    const double w = (k == 0 || k == N) ? 0.5 * h : h;
    H.block(tr.x_offset(k), tr.x_offset(k), nx, nx) += w * p.cost.Q;
  }
  H.block(tr.x_offset(N), tr.x_offset(N), nx, nx) += p.cost.Qf;
  // u_N aliases u_{N-1}, so the last control collects 1.5 h.
  for (int k = 0; k <= N; ++k) {
    const double w = (k == 0 || k == N) ? 0.5 * h : h;
    H.block(tr.u_offset(k), tr.u_offset(k), 1, 1) += w * p.cost.R;
  }
  const Eigen::Index nc = tr.defect_count() + nx;
  MatrixXd C = MatrixXd::Zero(nc, nz);
  VectorXd b = VectorXd::Zero(nc);
  const MatrixXd I = MatrixXd::Identity(nx, nx);
  for (int k = 0; k < N; ++k) {
    const Eigen::Index r = static_cast<Eigen::Index>(k) * nx;
    C.block(r, tr.x_offset(k), nx, nx) += -I - 0.5 * h * m.A();
    C.block(r, tr.x_offset(k + 1), nx, nx) += I - 0.5 * h * m.A();
    C.block(r, tr.u_offset(k), nx, 1) += -0.5 * h * m.B();
    C.block(r, tr.u_offset(k + 1), nx, 1) += -0.5 * h * m.B();
  }
  C.block(tr.defect_count(), 0, nx, nx) = I;
  b.tail(nx) = p.x0;
  MatrixXd K = MatrixXd::Zero(nz + nc, nz + nc);
  K.topLeftCorner(nz, nz) = H;
  K.topRightCorner(nz, nc) = C.transpose();
  K.bottomLeftCorner(nc, nz) = C;
  VectorXd rhs = VectorXd::Zero(nz + nc);
  rhs.tail(nc) = b;
  const VectorXd sol = K.fullPivLu().solve(rhs);
  KktSolution out{sol.head(nz), 0.0};
  out.cost = 0.5 * out.z.dot(H * out.z);
  return out;
}

TEST(Collocation, LinearQuadraticProblemMatchesKktSolution) {
  const auto model = oscillator();
  const OcpProblem p = lq_problem(40, 1e3);
  const Transcription tr(p);
  const KktSolution oracle = solve_kkt(*model, p);
  EXPECT_NEAR(transcription_cost(tr, oracle.z), oracle.cost, 1e-10);
  EXPECT_LT(defects(tr, *model, oracle.z).cwiseAbs().maxCoeff(), 1e-10);

  // Converge well past the default defect tolerance: ALM cost error is
  // first order in the remaining defect.
  AlmSettings s;
  s.constraint_tol = 1e-10;
  s.opt_tol = 1e-8;
  const CollocationResult r = solve_collocation(
      p, *model, z_from_interpolation(tr, std::vector<VectorXd>(40, VectorXd::Zero(1))), s);
  EXPECT_EQ(r.trace.status, SolverStatus::converged);
  EXPECT_LT(r.defect_norm, 1e-10);
  EXPECT_LT(relative_error(r.cost, oracle.cost, 1e-300), 1e-5);
  EXPECT_LT((r.z - oracle.z).cwiseAbs().maxCoeff(), 1e-4);
  EXPECT_EQ(r.xs.front(), p.x0);
  EXPECT_GE(r.inner_steps, static_cast<int>(r.trace.size()));
}

TEST(Collocation, BoxBoundsHoldAndTraceRecordsOuterIterations) {
  const auto model = oscillator();
  const OcpProblem p = lq_problem(40, 0.3);
  const Transcription tr(p);
  const CollocationResult r = solve_collocation(p, *model, z_from_rollout(tr, *model, std::vector<VectorXd>(40, VectorXd::Zero(1))));
  EXPECT_LT(r.defect_norm, 1e-6);
  for (const VectorXd& u : r.us) EXPECT_TRUE(p.bounds.contains(u));
  EXPECT_GT(r.cost, solve_kkt(*model, lq_problem(40, 1e3)).cost);
  for (const IterationRecord& rec : r.trace.iterations()) {
    EXPECT_GT(rec.regularization, 0.0);
    EXPECT_TRUE(std::isfinite(rec.merit));
    EXPECT_GE(rec.wall_time, 0.0);
  }
}

TEST(AlmSettings, Validation) {
  AlmSettings s;
  s.penalty_scale = 0.5;
  EXPECT_THROW(s.validate(), ConfigError);
  s = {};
  s.constraint_tol = 0.0;
  EXPECT_THROW(s.validate(), ConfigError);
}

}  // namespace
}  // namespace softtraj
