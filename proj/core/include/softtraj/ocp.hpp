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

// Shared optimal-control vocabulary: states, bounds, the quadratic swing-up
// cost, problem definitions, policies and solver traces.

#ifndef SOFTTRAJ_OCP_HPP
#define SOFTTRAJ_OCP_HPP

#include <string>
#include <vector>

#include <Eigen/Core>

namespace softtraj {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Stacked configuration/velocity state x = [q; qdot] of a mechanical chain.
class StateVector {
 public:
  StateVector() = default;
  StateVector(VectorXd q, VectorXd qdot);
  /// Splits a stacked vector of even length.
  static StateVector from_stacked(const VectorXd& x);

  int n() const { return static_cast<int>(q_.size()); }
  const VectorXd& q() const { return q_; }
  const VectorXd& qdot() const { return qdot_; }
  VectorXd stacked() const;

 private:
  VectorXd q_;
  VectorXd qdot_;
};

/// Componentwise box lb <= u <= ub. Infinite entries mean "unbounded".
struct ControlBounds {
  VectorXd lb;
  VectorXd ub;

  static ControlBounds symmetric(const VectorXd& u_max);
  static ControlBounds symmetric(int m, double u_max);
  static ControlBounds unbounded(int m);

  int m() const { return static_cast<int>(lb.size()); }
  void validate() const;
  VectorXd clamp(const VectorXd& u) const;
  bool contains(const VectorXd& u, double tol = 0.0) const;
};

/// l(x,u) = 1/2 e'Qe + 1/2 u'Ru and l_f(x) = 1/2 e'Q_f e, e = x_target - x.
struct QuadraticCost {
  MatrixXd Q;
  MatrixXd R;
  MatrixXd Qf;
  VectorXd x_target;

  static QuadraticCost diagonal(const VectorXd& q_diag, const VectorXd& r_diag,
                                const VectorXd& qf_diag,
                                const VectorXd& x_target);

  int state_dim() const { return static_cast<int>(x_target.size()); }
  int control_dim() const { return static_cast<int>(R.rows()); }
  /// Throws ConfigError unless Q, Qf are symmetric PSD and R symmetric PD.
  void validate() const;
};

struct OcpProblem {
  QuadraticCost cost;
  ControlBounds bounds;
  double t_f = 0.0;
  int N = 0;
  double h = 0.0;
  VectorXd x0;

  /// Builds a problem with h = t_f / N.
  static OcpProblem make(QuadraticCost cost, ControlBounds bounds,
                         VectorXd x0, double t_f, int N);
  void validate() const;
  int state_dim() const { return cost.state_dim(); }
  int control_dim() const { return cost.control_dim(); }
};

enum class Quadrature { left_rectangle, trapezoid };

double stage_cost(const QuadraticCost& cost, const VectorXd& x,
                  const VectorXd& u);
double terminal_cost(const QuadraticCost& cost, const VectorXd& x);

/// Terminal cost plus quadrature-weighted stage costs. In trapezoid mode the
/// missing node control u_N is taken to be u_{N-1}.
double trajectory_cost(const OcpProblem& prob, const std::vector<VectorXd>& xs,
                       const std::vector<VectorXd>& us, Quadrature quadrature);

struct CostDerivatives {
  VectorXd lx;
  VectorXd lu;
  MatrixXd lxx;
  MatrixXd luu;
  MatrixXd lux;
};

CostDerivatives cost_derivatives(const QuadraticCost& cost, const VectorXd& x,
                                 const VectorXd& u);

struct TerminalCostDerivatives {
  VectorXd lx;
  MatrixXd lxx;
};

TerminalCostDerivatives terminal_cost_derivatives(const QuadraticCost& cost,
                                                  const VectorXd& x);

/// Nominal trajectory plus the time-varying affine policy around it.
struct PolicyTrajectory {
  std::vector<VectorXd> xs;     // N+1 states
  std::vector<VectorXd> us;     // N controls
  std::vector<MatrixXd> gains;  // L_k, m x 2n
  std::vector<VectorXd> ffs;    // l_k, m
  ControlBounds bounds;
  double total_cost = 0.0;

  int horizon() const { return static_cast<int>(us.size()); }
};

enum class SolverStatus {
  converged,
  max_iterations,
  regularization_failure,
  not_converged,
  failed,
};

std::string to_string(SolverStatus status);

struct IterationRecord {
  int iteration = 0;
  double cost = 0.0;
  double gradient_norm = 0.0;
  bool accepted = false;
  double alpha = 0.0;
  double wall_time = 0.0;  // seconds
  double regularization = 0.0;
  double constraint_violation = 0.0;
  /// Solver merit function (augmented Lagrangian for collocation); equals
  /// cost for shooting solvers.
  double merit = 0.0;
};

/// Per-iteration record of a solve. Indices are assigned on append so they
/// always run 0, 1, 2, ...
class SolverTrace {
 public:
  IterationRecord& append(IterationRecord record);
  const std::vector<IterationRecord>& iterations() const { return records_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  const IterationRecord& back() const { return records_.back(); }
  IterationRecord& back() { return records_.back(); }

  /// Number of accepted iterations.
  int accepted_count() const;
  /// First iteration whose cost lies within `fraction` of the final cost,
  /// -1 for an empty trace.
  int iterations_to_within(double fraction) const;
  double mean_wall_time() const;

  SolverStatus status = SolverStatus::not_converged;

 private:
  std::vector<IterationRecord> records_;
};

}  // namespace softtraj

#endif  // SOFTTRAJ_OCP_HPP
