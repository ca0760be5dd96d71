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

#include "softtraj/ocp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "softtraj/errors.hpp"

namespace softtraj {

namespace {

void require(bool condition, const std::string& what) {
  if (!condition) throw ConfigError(what);
}

void check_dims(const QuadraticCost& cost, const VectorXd& x) {
  if (x.size() != cost.x_target.size()) {
    std::ostringstream msg;
    msg << "state has length " << x.size() << ", cost expects "
        << cost.x_target.size();
    throw ConfigError(msg.str());
  }
}

void check_dims(const QuadraticCost& cost, const VectorXd& x,
                const VectorXd& u) {
  check_dims(cost, x);
  if (u.size() != cost.R.rows()) {
    std::ostringstream msg;
    msg << "control has length " << u.size() << ", cost expects "
        << cost.R.rows();
    throw ConfigError(msg.str());
  }
}

double min_eigenvalue(const MatrixXd& A) {
  if (A.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(A, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

bool is_symmetric(const MatrixXd& A) {
  const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
  return (A - A.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale;
}

}  // namespace

StateVector::StateVector(VectorXd q, VectorXd qdot)
    : q_(std::move(q)), qdot_(std::move(qdot)) {
  require(q_.size() == qdot_.size(), "q and qdot must have equal length");
  require(q_.allFinite() && qdot_.allFinite(), "state entries must be finite");
}

StateVector StateVector::from_stacked(const VectorXd& x) {
  require(x.size() % 2 == 0, "stacked state must have even length");
  const Eigen::Index n = x.size() / 2;
  return StateVector(x.head(n), x.tail(n));
}

VectorXd StateVector::stacked() const {
  VectorXd x(2 * q_.size());
  x << q_, qdot_;
  return x;
}

ControlBounds ControlBounds::symmetric(const VectorXd& u_max) {
  ControlBounds b{-u_max, u_max};
  b.validate();
  return b;
}

ControlBounds ControlBounds::symmetric(int m, double u_max) {
  return symmetric(VectorXd::Constant(m, u_max));
}

ControlBounds ControlBounds::unbounded(int m) {
  const double inf = std::numeric_limits<double>::infinity();
  return ControlBounds{VectorXd::Constant(m, -inf), VectorXd::Constant(m, inf)};
}

void ControlBounds::validate() const {
  require(lb.size() == ub.size(), "bound vectors must have equal length");
  for (Eigen::Index i = 0; i < lb.size(); ++i) {
    require(!std::isnan(lb(i)) && !std::isnan(ub(i)), "bounds must not be NaN");
    require(lb(i) <= ub(i), "lower bound exceeds upper bound");
  }
}

VectorXd ControlBounds::clamp(const VectorXd& u) const {
  if (u.size() != lb.size()) throw ConfigError("control/bounds length mismatch");
  return u.cwiseMax(lb).cwiseMin(ub);
}

bool ControlBounds::contains(const VectorXd& u, double tol) const {
  if (u.size() != lb.size()) return false;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    if (u(i) < lb(i) - tol || u(i) > ub(i) + tol) return false;
  }
  return true;
}

QuadraticCost QuadraticCost::diagonal(const VectorXd& q_diag,
                                      const VectorXd& r_diag,
                                      const VectorXd& qf_diag,
                                      const VectorXd& x_target) {
  QuadraticCost c{q_diag.asDiagonal(), r_diag.asDiagonal(),
                  qf_diag.asDiagonal(), x_target};
  c.validate();
  return c;
}

void QuadraticCost::validate() const {
  const Eigen::Index nx = x_target.size();
  require(Q.rows() == nx && Q.cols() == nx, "Q must be 2n x 2n");
  require(Qf.rows() == nx && Qf.cols() == nx, "Qf must be 2n x 2n");
  require(R.rows() == R.cols(), "R must be square");
  require(x_target.allFinite(), "target state must be finite");
  require(is_symmetric(Q) && is_symmetric(Qf) && is_symmetric(R),
          "cost weights must be symmetric");
  require(min_eigenvalue(Q) >= -1e-10, "Q must be positive semidefinite");
  require(min_eigenvalue(Qf) >= -1e-10, "Qf must be positive semidefinite");
  require(R.rows() == 0 || min_eigenvalue(R) > 0.0,
          "R must be positive definite");
}

OcpProblem OcpProblem::make(QuadraticCost cost, ControlBounds bounds,
                            VectorXd x0, double t_f, int N) {
  require(N >= 1, "horizon N must be at least 1");
  OcpProblem p{std::move(cost), std::move(bounds), t_f, N, t_f / N,
               std::move(x0)};
  p.validate();
  return p;
}

void OcpProblem::validate() const {
  cost.validate();
  bounds.validate();
  require(N >= 1, "horizon N must be at least 1");
  require(h > 0.0, "step size h must be positive");
  require(std::abs(N * h - t_f) <= 1e-12 * std::max(1.0, t_f),
          "N * h must equal t_f");
  require(bounds.m() == cost.control_dim(),
          "bounds and cost disagree on control dimension");
  require(x0.size() == cost.state_dim(), "x0 has wrong length");
  require(x0.allFinite(), "x0 must be finite");
}

double stage_cost(const QuadraticCost& cost, const VectorXd& x,
                  const VectorXd& u) {
  check_dims(cost, x, u);
  const VectorXd e = cost.x_target - x;
  return 0.5 * e.dot(cost.Q * e) + 0.5 * u.dot(cost.R * u);
}

double terminal_cost(const QuadraticCost& cost, const VectorXd& x) {
  check_dims(cost, x);
  const VectorXd e = cost.x_target - x;
  return 0.5 * e.dot(cost.Qf * e);
}

double trajectory_cost(const OcpProblem& prob, const std::vector<VectorXd>& xs,
                       const std::vector<VectorXd>& us, Quadrature quadrature) {
  const std::size_t N = us.size();
  if (xs.size() != N + 1 || N == 0) {
    std::ostringstream msg;
    msg << "trajectory lengths mismatch: " << xs.size() << " states, "
        << us.size() << " controls";
    throw ConfigError(msg.str());
  }
  double total = terminal_cost(prob.cost, xs[N]);
  if (quadrature == Quadrature::left_rectangle) {
    for (std::size_t k = 0; k < N; ++k) {
      total += prob.h * stage_cost(prob.cost, xs[k], us[k]);
    }
  } else {
    double prev = stage_cost(prob.cost, xs[0], us[0]);
    for (std::size_t k = 0; k < N; ++k) {
      const VectorXd& u_next = k + 1 < N ? us[k + 1] : us[N - 1];
      const double next = stage_cost(prob.cost, xs[k + 1], u_next);
      total += 0.5 * prob.h * (prev + next);
      prev = next;
    }
  }
  return total;
}

CostDerivatives cost_derivatives(const QuadraticCost& cost, const VectorXd& x,
                                 const VectorXd& u) {
  check_dims(cost, x, u);
  const VectorXd e = cost.x_target - x;
  return CostDerivatives{-cost.Q * e, cost.R * u, cost.Q, cost.R,
                         MatrixXd::Zero(u.size(), x.size())};
}

TerminalCostDerivatives terminal_cost_derivatives(const QuadraticCost& cost,
                                                  const VectorXd& x) {
  check_dims(cost, x);
  const VectorXd e = cost.x_target - x;
  return TerminalCostDerivatives{-cost.Qf * e, cost.Qf};
}

std::string to_string(SolverStatus status) {
  switch (status) {
    case SolverStatus::converged:
      return "converged";
    case SolverStatus::max_iterations:
      return "max_iterations";
    case SolverStatus::regularization_failure:
      return "regularization_failure";
    case SolverStatus::not_converged:
      return "not_converged";
    case SolverStatus::failed:
      return "failed";
  }
  return "unknown";
}

IterationRecord& SolverTrace::append(IterationRecord record) {
  record.iteration = static_cast<int>(records_.size());
  records_.push_back(record);
  return records_.back();
}

int SolverTrace::accepted_count() const {
  return static_cast<int>(std::count_if(
      records_.begin(), records_.end(),
      [](const IterationRecord& r) { return r.accepted; }));
}

int SolverTrace::iterations_to_within(double fraction) const {
  if (records_.empty()) return -1;
  const double final_cost = records_.back().cost;
  const double band = fraction * std::max(std::abs(final_cost), 1e-300);
  for (const auto& r : records_) {
    if (std::abs(r.cost - final_cost) <= band) return r.iteration;
  }
  return records_.back().iteration;
}

double SolverTrace::mean_wall_time() const {
  if (records_.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& r : records_) sum += r.wall_time;
  return sum / static_cast<double>(records_.size());
}

}  // namespace softtraj
