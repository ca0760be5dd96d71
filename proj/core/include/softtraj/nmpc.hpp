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

// Receding-horizon control on top of Box-IDDP.
//
// Every step solves a horizon of p+1 controls from the measured state,
// applies the first control for one plant step and shifts the solution to
// warm-start the next step.

#ifndef SOFTTRAJ_NMPC_HPP
#define SOFTTRAJ_NMPC_HPP

#include <cstdint>
#include <vector>

#include "softtraj/box_iddp.hpp"

namespace softtraj {

/// Additive jump of the plant state right after plant step `step`.
struct ImpulseDisturbance {
  int step = -1;
  VectorXd delta;

  bool active() const { return step >= 0 && delta.size() > 0; }
};

/// Random kick of the given norm on the velocity entries listed in
/// `coordinates` (indices into qdot), seeded.
ImpulseDisturbance seeded_impulse(int state_dim, const std::vector<int>& coordinates,
                                  double magnitude, int step, std::uint64_t seed);

struct NmpcSettings {
  int p = 100;
  BoxIddpSettings inner = default_inner();
  int sim_steps = 300;
  ImpulseDisturbance disturbance;

  static BoxIddpSettings default_inner() {
    BoxIddpSettings s;
    s.max_iters = 5;
    return s;
  }
  void validate() const;
};

struct NmpcStepResult {
  VectorXd u_applied;
  std::vector<VectorXd> new_warm;
  SolverTrace inner_trace;
  PolicyTrajectory plan;
  bool degraded = false;
};

/// prob_template supplies cost, bounds and h; its x0 and horizon are
/// replaced by x_k and p+1 = warm.size().
NmpcStepResult nmpc_step(const OcpProblem& prob_template, const DynamicsModel& model,
                         const VectorXd& x_k, const std::vector<VectorXd>& warm,
                         const BoxIddpSettings& inner);

struct ClosedLoopResult {
  std::vector<VectorXd> xs;  // sim_steps + 1 plant states
  std::vector<VectorXd> us;  // sim_steps applied controls
  std::vector<SolverTrace> traces;
  int degraded_steps = 0;
};

/// initial_warm: p+1 controls (e.g. the head of an offline solution);
/// empty means zeros.
ClosedLoopResult run_closed_loop(const DynamicsModel& model_true,
                                 const DynamicsModel& model_ctrl, const VectorXd& x0,
                                 const OcpProblem& prob_template, const NmpcSettings& settings,
                                 const std::vector<VectorXd>& initial_warm = {});

/// Plays `us` open loop on `model` with the same plant step and disturbance
/// convention as run_closed_loop.
std::vector<VectorXd> replay_open_loop(const DynamicsModel& model, const VectorXd& x0,
                                       const std::vector<VectorXd>& us, double h,
                                       const ImpulseDisturbance& disturbance = {});

}  // namespace softtraj

#endif  // SOFTTRAJ_NMPC_HPP
