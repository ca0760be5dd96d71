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

// Box-constrained DDP on implicit-Euler dynamics.
//
// Stage costs are weighted by h (left-rectangle quadrature), the step map
// and its derivatives come from the implicit-Euler residual, and the control
// update at every knot is a box-constrained QP. Feedback follows
// du = l + L (x - x*).

#ifndef SOFTTRAJ_BOX_IDDP_HPP
#define SOFTTRAJ_BOX_IDDP_HPP

#include <vector>

#include <Eigen/Core>

#include "softtraj/integrator.hpp"
#include "softtraj/model.hpp"
#include "softtraj/ocp.hpp"

namespace softtraj {

enum class IddpHessian { gauss_newton, full_second_order };

struct QExpansion {
  VectorXd Qx;
  VectorXd Qu;
  MatrixXd Qxx;
  MatrixXd Quu;
  MatrixXd Qux;
};

struct ValueExpansion {
  VectorXd Vx;
  MatrixXd Vxx;
};

/// 1, 1/2, ..., 2^-10.
std::vector<double> default_alphas();

struct BoxIddpSettings {
  int max_iters = 200;
  double cost_tol = 1e-6;   // relative cost decrease
  double grad_tol = 1e-6;   // infinity norm of Qu over free directions
  double reg_init = 1e-6;
  double reg_min = 1e-8;    // below this mu snaps to zero
  double reg_max = 1e10;
  double reg_scale = 10.0;
  std::vector<double> alphas = default_alphas();
  IddpHessian hessian_mode = IddpHessian::gauss_newton;
  double accept_ratio = 0.0;
  bool parallel_line_search = false;
  /// Newton settings of the implicit steps; h is taken from the problem.
  ImplicitStepSettings step;

  void validate() const;
};

struct BackwardPassResult {
  bool success = false;
  int failed_step = -1;
  std::vector<VectorXd> ffs;
  std::vector<MatrixXd> gains;
  std::vector<QExpansion> expansions;
  /// Value expansion at k = 0 (index N holds the terminal expansion).
  std::vector<ValueExpansion> values;
  double dV_linear = 0.0;     // sum l'Qu
  double dV_quadratic = 0.0;  // 0.5 sum l'Quu l
  double grad_norm = 0.0;
  /// Factorized g_x' at every knot, reused as chord Newton matrices by the
  /// next forward pass.
  std::vector<Eigen::PartialPivLU<MatrixXd>> step_matrices;

  /// Predicted cost change for step size alpha (negative for descent).
  double expected_change(double alpha) const {
    return alpha * dV_linear + alpha * alpha * dV_quadratic;
  }
};

struct ForwardPassResult {
  bool success = false;
  std::vector<VectorXd> xs;
  std::vector<VectorXd> us;
  double cost = 0.0;
};

struct BoxIddpResult {
  PolicyTrajectory policy;
  SolverTrace trace;
};

/// warm_ffs (optional, length N) seeds the per-knot Box-QP solves.
BackwardPassResult backward_pass(const OcpProblem& prob, const DynamicsModel& model,
                                 const std::vector<VectorXd>& xs,
                                 const std::vector<VectorXd>& us, double mu,
                                 const BoxIddpSettings& settings,
                                 const std::vector<VectorXd>* warm_ffs = nullptr);

ForwardPassResult forward_pass(const OcpProblem& prob, const DynamicsModel& model,
                               const std::vector<VectorXd>& xs,
                               const std::vector<VectorXd>& us,
                               const std::vector<VectorXd>& ffs,
                               const std::vector<MatrixXd>& gains, double alpha,
                               const ImplicitStepSettings& step,
                               const std::vector<Eigen::PartialPivLU<MatrixXd>>* newton_matrices =
                                   nullptr);

BoxIddpResult solve_box_iddp(const OcpProblem& prob, const DynamicsModel& model,
                             const std::vector<VectorXd>& u_init,
                             const BoxIddpSettings& settings = {});

/// clamp(u*_k + L_k (x_measured - x*_k)).
VectorXd apply_feedback(const PolicyTrajectory& policy, int k,
                        const VectorXd& x_measured);

}  // namespace softtraj

#endif  // SOFTTRAJ_BOX_IDDP_HPP
