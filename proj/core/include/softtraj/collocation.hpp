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

// Trapezoidal direct collocation.
//
// Decision vector z = [x_0 .. x_N, u_0 .. u_{N-1}], with u_N taken equal to
// u_{N-1}. Dynamics enter as defects
//   d_k = x_{k+1} - x_k - h/2 (f(x_k, u_k) + f(x_{k+1}, u_{k+1})),
// and the initial state is pinned by equal lower and upper bounds on x_0.
// The constrained problem is solved by an augmented Lagrangian with
// projected Gauss-Newton inner iterations on a sparse LDL' factorization.

#ifndef SOFTTRAJ_COLLOCATION_HPP
#define SOFTTRAJ_COLLOCATION_HPP

#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "softtraj/model.hpp"
#include "softtraj/ocp.hpp"

namespace softtraj {

using SparseMatrixd = Eigen::SparseMatrix<double>;

class Transcription {
 public:
  explicit Transcription(const OcpProblem& prob);

  int nx() const { return nx_; }
  int nu() const { return nu_; }
  int N() const { return N_; }
  double h() const { return h_; }
  Eigen::Index dim() const { return static_cast<Eigen::Index>(nx_) * (N_ + 1) + nu_ * N_; }
  Eigen::Index defect_count() const { return static_cast<Eigen::Index>(nx_) * N_; }
  Eigen::Index x_offset(int k) const { return static_cast<Eigen::Index>(k) * nx_; }
  /// Offset of the control used at node k (node N reuses u_{N-1}).
  Eigen::Index u_offset(int k) const;

  VectorXd pack(const std::vector<VectorXd>& xs, const std::vector<VectorXd>& us) const;
  void unpack(const VectorXd& z, std::vector<VectorXd>& xs, std::vector<VectorXd>& us) const;

  /// Variable bounds: x_0 pinned, other states free, controls boxed.
  const VectorXd& lower() const { return lower_; }
  const VectorXd& upper() const { return upper_; }
  VectorXd project(const VectorXd& z) const;

  const OcpProblem& problem() const { return prob_; }

 private:
  OcpProblem prob_;
  int nx_;
  int nu_;
  int N_;
  double h_;
  VectorXd lower_;
  VectorXd upper_;
};

VectorXd defects(const Transcription& tr, const DynamicsModel& model, const VectorXd& z);

SparseMatrixd defect_jacobian(const Transcription& tr, const DynamicsModel& model,
                              const VectorXd& z);

/// Trapezoid trajectory cost of z.
double transcription_cost(const Transcription& tr, const VectorXd& z);

struct AlmSettings {
  double penalty_init = 10.0;
  double penalty_scale = 10.0;
  double penalty_max = 1e12;
  double constraint_tol = 1e-6;  // defect infinity norm
  double opt_tol = 1e-4;         // projected-gradient infinity norm
  int max_outer = 50;
  int max_inner = 100;
  double multiplier_clamp = 1e8;

  void validate() const;
};

struct CollocationResult {
  std::vector<VectorXd> xs;
  std::vector<VectorXd> us;
  VectorXd z;
  VectorXd multipliers;
  double cost = 0.0;
  double defect_norm = 0.0;
  /// One record per outer iteration; regularization holds the penalty.
  SolverTrace trace;
  /// Gauss-Newton steps summed over all outer iterations.
  int inner_steps = 0;
};

CollocationResult solve_collocation(const OcpProblem& prob, const DynamicsModel& model,
                                    const VectorXd& z_init, const AlmSettings& settings = {});

/// z from an RK4 rollout of us.
VectorXd z_from_rollout(const Transcription& tr, const DynamicsModel& model,
                        const std::vector<VectorXd>& us);

/// z with states interpolated linearly from x0 to the cost target.
VectorXd z_from_interpolation(const Transcription& tr, const std::vector<VectorXd>& us);

}  // namespace softtraj

#endif  // SOFTTRAJ_COLLOCATION_HPP
