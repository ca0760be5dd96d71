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

#include "softtraj/nmpc.hpp"

#include <random>
#include <string>

namespace softtraj {

namespace {

OcpProblem horizon_problem(const OcpProblem& tmpl, const VectorXd& x_k, int controls) {
  OcpProblem prob = tmpl;
  prob.x0 = x_k;
  prob.N = controls;
  prob.t_f = controls * tmpl.h;
  prob.validate();
  return prob;
}

std::vector<VectorXd> shifted(const std::vector<VectorXd>& us, const ControlBounds& bounds) {
  std::vector<VectorXd> out(us.begin() + 1, us.end());
  out.push_back(us.back());
  for (VectorXd& u : out) u = bounds.clamp(u);
  return out;
}

}  // namespace

ImpulseDisturbance seeded_impulse(int state_dim, const std::vector<int>& coordinates,
                                  double magnitude, int step, std::uint64_t seed) {
  const int n = state_dim / 2;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  VectorXd dir = VectorXd::Zero(state_dim);
  for (int c : coordinates) {
    if (c < 0 || c >= n) throw ConfigError("seeded_impulse: coordinate out of range");
    dir(n + c) = normal(rng);
  }
  if (dir.norm() == 0.0) throw ConfigError("seeded_impulse: no coordinates selected");
  return ImpulseDisturbance{step, magnitude * dir.normalized()};
}

void NmpcSettings::validate() const {
  if (p < 1) throw ConfigError("nmpc: p must be >= 1");
  if (sim_steps < 1) throw ConfigError("nmpc: sim_steps must be >= 1");
  if (inner.max_iters < 0) throw ConfigError("nmpc: inner max_iters must be >= 0");
}

NmpcStepResult nmpc_step(const OcpProblem& prob_template, const DynamicsModel& model,
                         const VectorXd& x_k, const std::vector<VectorXd>& warm,
                         const BoxIddpSettings& inner) {
  if (warm.empty()) throw ConfigError("nmpc_step: empty warm start");
  const OcpProblem prob = horizon_problem(prob_template, x_k, static_cast<int>(warm.size()));
  NmpcStepResult out;
  try {
    BoxIddpResult r = solve_box_iddp(prob, model, warm, inner);
    out.degraded = r.trace.status == SolverStatus::regularization_failure ||
                   r.trace.status == SolverStatus::failed;
    out.inner_trace = std::move(r.trace);
    out.plan = std::move(r.policy);
  } catch (const Error&) {
    out.degraded = true;
  }
  if (out.degraded || out.plan.us.empty()) {
    out.degraded = true;
    out.u_applied = prob.bounds.clamp(warm.front());
    out.new_warm = shifted(warm, prob.bounds);
    return out;
  }
  out.u_applied = out.plan.us.front();
  out.new_warm = shifted(out.plan.us, prob.bounds);
  return out;
}

ClosedLoopResult run_closed_loop(const DynamicsModel& model_true,
                                 const DynamicsModel& model_ctrl, const VectorXd& x0,
                                 const OcpProblem& prob_template, const NmpcSettings& settings,
                                 const std::vector<VectorXd>& initial_warm) {
  settings.validate();
  if (model_true.state_dim() != model_ctrl.state_dim() ||
      model_true.control_dim() != model_ctrl.control_dim()) {
    throw ConfigError("run_closed_loop: plant and controller models differ in dimensions");
  }
  const int m = model_ctrl.control_dim();
  std::vector<VectorXd> warm;
  for (int i = 0; i <= settings.p; ++i) {
    warm.push_back(i < static_cast<int>(initial_warm.size())
                       ? prob_template.bounds.clamp(initial_warm[i])
                       : (initial_warm.empty() ? VectorXd::Zero(m)
                                               : prob_template.bounds.clamp(initial_warm.back())));
  }
  ImplicitStepSettings plant = settings.inner.step;
  plant.h = prob_template.h;

  ClosedLoopResult out;
  out.xs.push_back(x0);
  for (int k = 0; k < settings.sim_steps; ++k) {
    NmpcStepResult step = nmpc_step(prob_template, model_ctrl, out.xs.back(), warm, settings.inner);
    if (step.degraded) ++out.degraded_steps;
    VectorXd x_next;
    try {
      x_next = implicit_step(model_true, out.xs.back(), step.u_applied, plant).xp;
    } catch (const IntegrationError& e) {
      throw IntegrationError("closed loop: plant step " + std::to_string(k) + " failed",
                             e.residual_norm(), k);
    }
    if (settings.disturbance.active() && settings.disturbance.step == k) {
      x_next += settings.disturbance.delta;
    }
    out.us.push_back(step.u_applied);
    out.xs.push_back(std::move(x_next));
    out.traces.push_back(std::move(step.inner_trace));
    warm = std::move(step.new_warm);
  }
  return out;
}

std::vector<VectorXd> replay_open_loop(const DynamicsModel& model, const VectorXd& x0,
                                       const std::vector<VectorXd>& us, double h,
                                       const ImpulseDisturbance& disturbance) {
  ImplicitStepSettings st;
  st.h = h;
  std::vector<VectorXd> xs{x0};
  for (std::size_t k = 0; k < us.size(); ++k) {
    VectorXd next = implicit_step(model, xs.back(), us[k], st).xp;
    if (disturbance.active() && disturbance.step == static_cast<int>(k)) next += disturbance.delta;
    xs.push_back(std::move(next));
  }
  return xs;
}

}  // namespace softtraj
