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

#include "softtraj/box_iddp.hpp"

#include <chrono>
#include <cmath>
#include <future>
#include <limits>

#include "softtraj/boxqp.hpp"
#include "softtraj/linalg.hpp"

namespace softtraj {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

ImplicitStepSettings step_for(const OcpProblem& prob, ImplicitStepSettings step) {
  step.h = prob.h;
  return step;
}

void check_trajectory(const OcpProblem& prob, const DynamicsModel& model,
                      const std::vector<VectorXd>& xs, const std::vector<VectorXd>& us) {
  if (static_cast<int>(us.size()) != prob.N || static_cast<int>(xs.size()) != prob.N + 1) {
    throw ConfigError("trajectory length does not match the horizon");
  }
  if (model.state_dim() != prob.state_dim() || model.control_dim() != prob.control_dim()) {
    throw ConfigError("model dimensions do not match the problem");
  }
}

}  // namespace

std::vector<double> default_alphas() {
  std::vector<double> a;
  for (int i = 0; i <= 10; ++i) a.push_back(std::ldexp(1.0, -i));
  return a;
}

void BoxIddpSettings::validate() const {
  if (max_iters < 0) throw ConfigError("box-iddp: max_iters must be >= 0");
  if (!(cost_tol > 0.0) || !(grad_tol > 0.0)) {
    throw ConfigError("box-iddp: tolerances must be positive");
  }
  if (!(reg_init >= 0.0 && reg_min > 0.0 && reg_max > reg_min && reg_scale > 1.0)) {
    throw ConfigError("box-iddp: invalid regularization schedule");
  }
  if (alphas.empty()) throw ConfigError("box-iddp: empty line-search schedule");
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    if (!(alphas[i] > 0.0 && alphas[i] <= 1.0)) {
      throw ConfigError("box-iddp: line-search factors must lie in (0, 1]");
    }
    if (i > 0 && !(alphas[i] < alphas[i - 1])) {
      throw ConfigError("box-iddp: line-search schedule must be descending");
    }
  }
  if (accept_ratio < 0.0) throw ConfigError("box-iddp: accept_ratio must be >= 0");
}

BackwardPassResult backward_pass(const OcpProblem& prob, const DynamicsModel& model,
                                 const std::vector<VectorXd>& xs,
                                 const std::vector<VectorXd>& us, double mu,
                                 const BoxIddpSettings& settings,
                                 const std::vector<VectorXd>* warm_ffs) {
  check_trajectory(prob, model, xs, us);
  const int N = prob.N;
  const double h = prob.h;
  const int nx = prob.state_dim();
  const int nu = prob.control_dim();
  const bool full = settings.hessian_mode == IddpHessian::full_second_order;

  BackwardPassResult out;
  out.ffs.assign(N, VectorXd::Zero(nu));
  out.gains.assign(N, MatrixXd::Zero(nu, nx));
  out.expansions.resize(N);
  out.values.resize(N + 1);
  out.step_matrices.resize(N);
  const TerminalCostDerivatives term = terminal_cost_derivatives(prob.cost, xs[N]);
  VectorXd Vx = term.lx;
  MatrixXd Vxx = term.lxx;
  out.values[N] = ValueExpansion{Vx, Vxx};

  for (int k = N - 1; k >= 0; --k) {
    const ResidualDerivatives rd =
        residual_derivatives(model, xs[k], xs[k + 1], us[k], h, full ? 2 : 1);
    const DiscreteJacobians jac = discrete_jacobians(rd);
    out.step_matrices[k].compute(rd.g_xp);
    const CostDerivatives cd = cost_derivatives(prob.cost, xs[k], us[k]);
    const MatrixXd& fx = jac.fx;
    const MatrixXd& fu = jac.fu;

    QExpansion q;
    q.Qx = h * cd.lx + fx.transpose() * Vx;
    q.Qu = h * cd.lu + fu.transpose() * Vx;
    const MatrixXd Vxx_fx = Vxx * fx;
    q.Qxx = h * cd.lxx + fx.transpose() * Vxx_fx;
    q.Quu = h * cd.luu + fu.transpose() * Vxx * fu;
    q.Qux = h * cd.lux + fu.transpose() * Vxx_fx;
    if (full) {
      const DiscreteHessians hs = discrete_hessians(rd, jac);
      for (int i = 0; i < nx; ++i) {
        if (Vx(i) == 0.0) continue;
        q.Qxx += Vx(i) * hs.Fxx[i];
        q.Quu += Vx(i) * hs.Fuu[i];
        q.Qux += Vx(i) * hs.Fxu[i].transpose();
      }
    }
    q.Qxx = symmetrized(q.Qxx);
    q.Quu = symmetrized(q.Quu);
    if (!q.Qxx.allFinite() || !q.Quu.allFinite() || !q.Qux.allFinite() ||
        !q.Qx.allFinite() || !q.Qu.allFinite()) {
      out.failed_step = k;
      return out;
    }

    const MatrixXd Quu_reg = q.Quu + mu * MatrixXd::Identity(nu, nu);
    const VectorXd lb = prob.bounds.lb - us[k];
    const VectorXd ub = prob.bounds.ub - us[k];
    const VectorXd warm = (warm_ffs != nullptr && static_cast<int>(warm_ffs->size()) == N &&
                           (*warm_ffs)[k].size() == nu)
                              ? (*warm_ffs)[k]
                              : VectorXd::Zero(nu);
    const BoxQpResult qp = solve_boxqp(Quu_reg, q.Qu, lb, ub, warm);
    if (qp.status == BoxQpStatus::non_pd_hessian) {
      out.failed_step = k;
      return out;
    }
    const VectorXd& l = qp.u_star;
    const MatrixXd L = feedback_gains(qp, q.Qux);
    for (int i = 0; i < nu; ++i) {
      if (qp.free[i]) out.grad_norm = std::max(out.grad_norm, std::abs(q.Qu(i)));
    }
    out.dV_linear += l.dot(q.Qu);
    out.dV_quadratic += 0.5 * l.dot(q.Quu * l);

    const MatrixXd Lt_Quu = L.transpose() * q.Quu;
    Vx = q.Qx + Lt_Quu * l + L.transpose() * q.Qu + q.Qux.transpose() * l;
    Vxx = q.Qxx + Lt_Quu * L + L.transpose() * q.Qux + q.Qux.transpose() * L;
    Vxx = symmetrized(Vxx);

    out.ffs[k] = l;
    out.gains[k] = L;
    out.values[k] = ValueExpansion{Vx, Vxx};
    out.expansions[k] = std::move(q);
  }
  out.success = true;
  return out;
}

ForwardPassResult forward_pass(const OcpProblem& prob, const DynamicsModel& model,
                               const std::vector<VectorXd>& xs,
                               const std::vector<VectorXd>& us,
                               const std::vector<VectorXd>& ffs,
                               const std::vector<MatrixXd>& gains, double alpha,
                               const ImplicitStepSettings& step,
                               const std::vector<Eigen::PartialPivLU<MatrixXd>>* newton_matrices) {
  check_trajectory(prob, model, xs, us);
  const ImplicitStepSettings st = step_for(prob, step);
  ForwardPassResult out;
  out.xs.reserve(prob.N + 1);
  out.us.reserve(prob.N);
  out.xs.push_back(prob.x0);
  for (int k = 0; k < prob.N; ++k) {
    const VectorXd dx = out.xs[k] - xs[k];
    const VectorXd u = prob.bounds.clamp(us[k] + alpha * ffs[k] + gains[k] * dx);
    out.us.push_back(u);
    try {
      try {
        if (newton_matrices != nullptr && static_cast<int>(newton_matrices->size()) == prob.N) {
          out.xs.push_back(
              implicit_step_chord(model, out.xs[k], u, st, xs[k + 1], (*newton_matrices)[k]).xp);
        } else {
          out.xs.push_back(implicit_step(model, out.xs[k], u, st, xs[k + 1]).xp);
        }
      } catch (const IntegrationError&) {
        out.xs.push_back(implicit_step(model, out.xs[k], u, st).xp);
      }
    } catch (const Error&) {
      return out;
    }
  }
  out.cost = trajectory_cost(prob, out.xs, out.us, Quadrature::left_rectangle);
  out.success = std::isfinite(out.cost);
  return out;
}

BoxIddpResult solve_box_iddp(const OcpProblem& prob, const DynamicsModel& model,
                             const std::vector<VectorXd>& u_init,
                             const BoxIddpSettings& settings) {
  prob.validate();
  settings.validate();
  if (static_cast<int>(u_init.size()) != prob.N) {
    throw ConfigError("box-iddp: u_init length must equal N");
  }
  if (model.state_dim() != prob.state_dim() || model.control_dim() != prob.control_dim()) {
    throw ConfigError("box-iddp: model dimensions do not match the problem");
  }
  const ImplicitStepSettings step = step_for(prob, settings.step);

  std::vector<VectorXd> us;
  us.reserve(prob.N);
  for (const VectorXd& u : u_init) {
    if (u.size() != prob.control_dim()) throw ConfigError("box-iddp: control has wrong length");
    us.push_back(prob.bounds.clamp(u));
  }
  std::vector<VectorXd> xs = rollout(model, prob.x0, us, step);
  double cost = trajectory_cost(prob, xs, us, Quadrature::left_rectangle);
  if (!std::isfinite(cost)) throw NumericalError("box-iddp: initial rollout cost is not finite");

  BoxIddpResult result;
  SolverTrace& trace = result.trace;
  double mu = settings.reg_init;
  BackwardPassResult bp;
  bool bp_current = false;  // bp belongs to (xs, us)
  trace.status = SolverStatus::max_iterations;

  for (int iter = 0; iter < settings.max_iters; ++iter) {
    const auto t0 = Clock::now();
    IterationRecord rec;
    rec.regularization = mu;
    const std::vector<VectorXd>* warm = bp.ffs.empty() ? nullptr : &bp.ffs;
    BackwardPassResult next = backward_pass(prob, model, xs, us, mu, settings, warm);
    if (!next.success) {
      mu = std::max(mu * settings.reg_scale, settings.reg_min);
      rec.cost = cost;
      rec.wall_time = seconds_since(t0);
      rec.merit = rec.cost;
      trace.append(rec);
      if (mu > settings.reg_max) {
        trace.status = SolverStatus::regularization_failure;
        break;
      }
      continue;
    }
    bp = std::move(next);
    bp_current = true;
    rec.gradient_norm = bp.grad_norm;
    if (bp.grad_norm < settings.grad_tol) {
      rec.cost = cost;
      rec.wall_time = seconds_since(t0);
      rec.merit = rec.cost;
      trace.append(rec);
      trace.status = SolverStatus::converged;
      break;
    }

    auto acceptable = [&](const ForwardPassResult& fp, double alpha) {
      if (!fp.success || !(fp.cost < cost)) return false;
      if (settings.accept_ratio <= 0.0) return true;
      const double expected = -bp.expected_change(alpha);
      return expected > 0.0 && (cost - fp.cost) >= settings.accept_ratio * expected;
    };
    ForwardPassResult accepted;
    double accepted_alpha = 0.0;
    if (settings.parallel_line_search && settings.alphas.size() > 1) {
      std::vector<std::future<ForwardPassResult>> jobs;
      for (double a : settings.alphas) {
        jobs.push_back(std::async(std::launch::async, [&, a] {
          return forward_pass(prob, model, xs, us, bp.ffs, bp.gains, a, step, &bp.step_matrices);
        }));
      }
      std::vector<ForwardPassResult> done;
      for (auto& j : jobs) done.push_back(j.get());
      for (std::size_t i = 0; i < done.size(); ++i) {
        if (acceptable(done[i], settings.alphas[i])) {
          accepted = std::move(done[i]);
          accepted_alpha = settings.alphas[i];
          break;
        }
      }
    } else {
      for (double a : settings.alphas) {
        ForwardPassResult fp = forward_pass(prob, model, xs, us, bp.ffs, bp.gains, a, step, &bp.step_matrices);
        if (acceptable(fp, a)) {
          accepted = std::move(fp);
          accepted_alpha = a;
          break;
        }
      }
    }

    if (accepted_alpha > 0.0) {
      const double rel = (cost - accepted.cost) / std::max(std::abs(cost), 1e-300);
      xs = std::move(accepted.xs);
      us = std::move(accepted.us);
      cost = accepted.cost;
      bp_current = false;
      mu = mu / settings.reg_scale;
      if (mu < settings.reg_min) mu = 0.0;
      rec.accepted = true;
      rec.alpha = accepted_alpha;
      rec.cost = cost;
      rec.wall_time = seconds_since(t0);
      rec.merit = rec.cost;
      trace.append(rec);
      if (rel < settings.cost_tol) {
        trace.status = SolverStatus::converged;
        break;
      }
      continue;
    }

    rec.cost = cost;
    rec.wall_time = seconds_since(t0);
    rec.merit = rec.cost;
    trace.append(rec);
    // No decrease left to find at the predicted scale: stationary point.
    if (-bp.expected_change(1.0) < settings.cost_tol * std::abs(cost)) {
      trace.status = SolverStatus::converged;
      break;
    }
    mu = std::max(mu * settings.reg_scale, settings.reg_min);
    if (mu > settings.reg_max) {
      trace.status = SolverStatus::regularization_failure;
      break;
    }
  }

  // Gains must belong to the returned trajectory.
  if (!bp_current) {
    double m = mu;
    for (int attempt = 0; attempt < 40; ++attempt) {
      BackwardPassResult fin = backward_pass(prob, model, xs, us, m, settings,
                                             bp.ffs.empty() ? nullptr : &bp.ffs);
      if (fin.success) {
        bp = std::move(fin);
        bp_current = true;
        break;
      }
      m = std::max(m * settings.reg_scale, settings.reg_min);
      if (m > settings.reg_max) break;
    }
  }

  PolicyTrajectory& policy = result.policy;
  policy.xs = std::move(xs);
  policy.us = std::move(us);
  policy.bounds = prob.bounds;
  policy.total_cost = cost;
  if (bp_current) {
    policy.gains = bp.gains;
    policy.ffs = bp.ffs;
  } else {
    policy.gains.assign(prob.N, MatrixXd::Zero(prob.control_dim(), prob.state_dim()));
    policy.ffs.assign(prob.N, VectorXd::Zero(prob.control_dim()));
  }
  return result;
}

VectorXd apply_feedback(const PolicyTrajectory& policy, int k, const VectorXd& x_measured) {
  if (k < 0 || k >= policy.horizon()) throw InputError("apply_feedback: knot index out of range");
  if (x_measured.size() != policy.xs[k].size()) {
    throw ConfigError("apply_feedback: state has wrong length");
  }
  if (!x_measured.allFinite()) throw InputError("apply_feedback: non-finite state");
  VectorXd u = policy.us[k];
  if (k < static_cast<int>(policy.gains.size())) {
    u += policy.gains[k] * (x_measured - policy.xs[k]);
  }
  return policy.bounds.clamp(u);
}

}  // namespace softtraj
