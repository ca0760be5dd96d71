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

// Resolution ladder: solve the swing-up on progressively richer strain
// parameterizations of the same chain, lifting each solution into the next
// stage's coordinates.
//
// Lifting relies on the nesting of truncated Legendre bases: coefficients
// that exist in both stages are copied, new ones start at zero, so the
// strain field is preserved pointwise.

#ifndef SOFTTRAJ_WARMSTART_HPP
#define SOFTTRAJ_WARMSTART_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "softtraj/box_iddp.hpp"
#include "softtraj/collocation.hpp"
#include "softtraj/gvs.hpp"
#include "softtraj/ocp.hpp"

namespace softtraj {

struct LadderStage {
  std::string name;
  ChainLayout layout;
};

/// rigid -> constant curvature -> order-2 curvature -> order-2 in every mode.
/// With split_linear_modes the last step adds stretch and shear separately.
std::vector<LadderStage> default_cartpole_ladder(const SoftLinkParams& rod = {},
                                                 double cart_mass = 1.0,
                                                 double joint_damping = 0.05,
                                                 bool split_linear_modes = false);

/// Ladder ending at `target`: every soft link follows rigid -> constant
/// curvature -> curvature at its own order -> all of its modes, with each
/// stage clipped to the link's orders. Stages that would repeat the previous
/// one are dropped.
std::vector<LadderStage> ladder_to(const ChainLayout& target, bool split_linear_modes = false);

/// Throws ConfigError unless `to` nests `from` (same element sequence, every
/// mode order at least as high).
void check_nesting(const ChainLayout& from, const ChainLayout& to);

VectorXd lift_configuration(const ChainLayout& from, const ChainLayout& to,
                            const VectorXd& q_prev);
VectorXd lift_state(const ChainLayout& from, const ChainLayout& to, const VectorXd& x_prev);
/// Feedback gains m x 2n_prev -> m x 2n_new (zero columns for new coordinates).
MatrixXd lift_gain(const ChainLayout& from, const ChainLayout& to, const MatrixXd& L_prev);
std::vector<VectorXd> lift_control(const ChainLayout& from, const ChainLayout& to,
                                   const std::vector<VectorXd>& us_prev,
                                   const ControlBounds& bounds);

/// Soft coordinates balancing elastic and gravity forces with the joints
/// pinned at `joint_values` (in chain order). Newton on h(q, 0) = 0.
VectorXd static_equilibrium(const GvsModel& model, const VectorXd& joint_values,
                            double tol = 1e-10, int max_iters = 100);

/// Swing-up problem description independent of the strain resolution.
/// Weights are given per rigid joint and as one value for all soft
/// coordinates; positions and velocities are weighted separately.
struct SwingUpSpec {
  double t_f = 2.0;
  int N = 200;
  double u_max = 200.0;
  VectorXd joint_start;     // joint values at the hanging start
  VectorXd joint_target;    // joint values at the upright target
  VectorXd joint_weight;    // running weights on joint positions
  VectorXd joint_rate_weight;
  double soft_weight = 0.0;
  double soft_rate_weight = 0.0;
  double control_weight = 1e-3;
  /// Terminal weights are the running ones times this factor, plus the
  /// explicit terminal joint weights below when given.
  double terminal_scale = 100.0;
  VectorXd terminal_joint_weight;
  VectorXd terminal_joint_rate_weight;

  /// Builds the problem with start and target at the model's own static
  /// equilibria.
  OcpProblem build(const GvsModel& model) const;
  void validate(const GvsModel& model) const;
};

/// Swing-up defaults for the soft cart-pole: cart at 0, pole from 0 to pi.
SwingUpSpec default_cartpole_swingup();
/// Swing-up defaults for the soft pendubot: both joints from 0 to (pi, 0).
SwingUpSpec default_pendubot_swingup();

enum class LadderSolver { box_iddp, collocation };

struct LadderSettings {
  LadderSolver solver = LadderSolver::box_iddp;
  BoxIddpSettings iddp;
  AlmSettings alm;
  /// Roll lifted controls out with the previous stage's lifted feedback
  /// gains instead of replaying them open loop.
  bool feedback_lift = false;
};

struct StageOutcome {
  std::string name;
  int n = 0;
  OcpProblem problem;
  PolicyTrajectory policy;
  SolverTrace trace;
  /// Cost of the initial guess on this stage's model.
  double initial_cost = 0.0;
};

struct LadderResult {
  std::vector<StageOutcome> stages;
  /// False when a stage threw; stages then holds the completed prefix.
  bool completed = true;
  std::string failed_stage;
  std::string error;
  const StageOutcome& final_stage() const { return stages.back(); }
};

/// Rolls out the lifted policy of `prev` on `model` (closed loop when
/// gains are present and requested) and returns the resulting controls.
std::vector<VectorXd> warm_controls(const StageOutcome& prev, const ChainLayout& from,
                                    const GvsModel& model, const OcpProblem& prob,
                                    bool feedback);

LadderResult run_ladder(const std::vector<LadderStage>& ladder, const SwingUpSpec& spec,
                        const std::vector<VectorXd>& u_seed, const LadderSettings& settings);

/// Uniform controls in [-fraction, fraction] * u_max, seeded.
std::vector<VectorXd> pseudo_random_controls(int N, const ControlBounds& bounds,
                                             std::uint64_t seed, double fraction = 0.1);

}  // namespace softtraj

#endif  // SOFTTRAJ_WARMSTART_HPP
