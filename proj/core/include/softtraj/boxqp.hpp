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

// Projected-Newton solver for box-constrained quadratic programs
//   min 0.5 x'Hx + g'x  s.t.  lb <= x <= ub
// in the style of Tassa, Mansard and Todorov (ICRA 2014).

#ifndef SOFTTRAJ_BOXQP_HPP
#define SOFTTRAJ_BOXQP_HPP

#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

namespace softtraj {

using Eigen::MatrixXd;
using Eigen::VectorXd;

enum class BoxQpStatus { converged, max_iters, non_pd_hessian, line_search_failed };

struct BoxQpSettings {
  int max_iters = 100;
  double grad_tol = 1e-9;       // infinity norm of the free gradient
  double clamp_tol = 1e-12;     // distance to a bound counted as "at bound"
  double armijo = 0.1;
  double step_factor = 0.6;
  double min_step = 1e-22;
  double min_rel_improve = 1e-14;
};

struct BoxQpResult {
  VectorXd u_star;
  std::vector<bool> free;  // unclamped coordinates at u_star
  /// Cholesky factor of H restricted to the free set.
  Eigen::LLT<MatrixXd> H_free_factor;
  BoxQpStatus status = BoxQpStatus::max_iters;
  int iterations = 0;
  double objective = 0.0;

  int free_count() const;
};

double boxqp_objective(const MatrixXd& H, const VectorXd& g, const VectorXd& x);

BoxQpResult solve_boxqp(const MatrixXd& H, const VectorXd& g, const VectorXd& lb,
                        const VectorXd& ub, const VectorXd& u_init,
                        const BoxQpSettings& settings = {});

/// Feedback gains of the box-constrained minimizer: zero rows on clamped
/// coordinates, -H_ff^{-1} Qux_f on free ones.
MatrixXd feedback_gains(const BoxQpResult& result, const MatrixXd& Qux);

}  // namespace softtraj

#endif  // SOFTTRAJ_BOXQP_HPP
