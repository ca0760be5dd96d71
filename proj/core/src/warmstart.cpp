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

#include "softtraj/warmstart.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include "softtraj/integrator.hpp"

namespace softtraj {

namespace {

// Calls visit(from_index, to_index) for every coordinate shared by the two
// layouts.
template <typename Visit>
void for_shared_coordinates(const ChainLayout& from, const ChainLayout& to, Visit visit) {
  check_nesting(from, to);
  int a = 0, b = 0;
  for (std::size_t e = 0; e < from.elements.size(); ++e) {
    const auto* lf = std::get_if<SoftLink>(&from.elements[e]);
    if (lf == nullptr) {
      visit(a++, b++);
      continue;
    }
    const auto& lt = std::get<SoftLink>(to.elements[e]);
    for (int mode = 0; mode < kStrainModes; ++mode) {
      const auto m = static_cast<StrainMode>(mode);
      const int fo = lf->basis.mode_offset(m);
      const int to_off = lt.basis.mode_offset(m);
      for (int k = 0; k <= lf->basis.order[mode]; ++k) visit(a + fo + k, b + to_off + k);
    }
    a += lf->basis.dof();
    b += lt.basis.dof();
  }
}

}  // namespace

std::vector<LadderStage> default_cartpole_ladder(const SoftLinkParams& rod, double cart_mass,
                                                 double joint_damping, bool split_linear_modes) {
  std::vector<LadderStage> ladder;
  auto add = [&](std::string name, StrainBasis basis) {
    ladder.push_back({std::move(name), soft_cartpole_layout(basis, rod, cart_mass, joint_damping)});
  };
  add("rigid", StrainBasis::rigid());
  add("constant-curvature", StrainBasis::curvature_only(0));
  add("curvature-order-2", StrainBasis::curvature_only(2));
  if (split_linear_modes) add("curvature-stretch", StrainBasis{{2, 2, -1}});
  add("full-order-2", StrainBasis::full(2));
  return ladder;
}

std::vector<LadderStage> ladder_to(const ChainLayout& target, bool split_linear_modes) {
  target.validate();
  std::vector<LadderStage> ladder;
  auto add = [&](std::string name, const StrainBasis& cap) {
    ChainLayout layout = target;
    for (ChainElement& el : layout.elements) {
      if (auto* link = std::get_if<SoftLink>(&el)) {
        for (int mode = 0; mode < kStrainModes; ++mode) {
          link->basis.order[mode] = std::min(link->basis.order[mode], cap.order[mode]);
        }
      }
    }
    if (!ladder.empty() && ladder.back().layout.n() == layout.n()) return;
    ladder.push_back({std::move(name), std::move(layout)});
  };
  constexpr int kAll = std::numeric_limits<int>::max();
  add("rigid", StrainBasis::rigid());
  add("constant-curvature", StrainBasis::curvature_only(0));
  add("curvature", StrainBasis{{kAll, -1, -1}});
  if (split_linear_modes) add("curvature-stretch", StrainBasis{{kAll, kAll, -1}});
  add("full", StrainBasis{{kAll, kAll, kAll}});
  return ladder;
}

void check_nesting(const ChainLayout& from, const ChainLayout& to) {
  if (from.elements.size() != to.elements.size()) {
    throw ConfigError("ladder stages have different element counts");
  }
  for (std::size_t e = 0; e < from.elements.size(); ++e) {
    const auto* lf = std::get_if<SoftLink>(&from.elements[e]);
    const auto* lt = std::get_if<SoftLink>(&to.elements[e]);
    if ((lf == nullptr) != (lt == nullptr)) {
      throw ConfigError("ladder stages differ in element kinds");
    }
    if (lf == nullptr) {
      const auto& jf = std::get<RigidJoint>(from.elements[e]);
      const auto& jt = std::get<RigidJoint>(to.elements[e]);
      if (jf.kind != jt.kind || jf.actuated != jt.actuated) {
        throw ConfigError("ladder stages differ in joint kind or actuation");
      }
      continue;
    }
    for (int mode = 0; mode < kStrainModes; ++mode) {
      if (lt->basis.order[mode] < lf->basis.order[mode]) {
        throw ConfigError("ladder stage lowers a strain order; lifting needs nested bases");
      }
    }
  }
}

VectorXd lift_configuration(const ChainLayout& from, const ChainLayout& to,
                            const VectorXd& q_prev) {
  if (q_prev.size() != from.n()) throw ConfigError("lift: configuration has wrong length");
  VectorXd q = VectorXd::Zero(to.n());
  for_shared_coordinates(from, to, [&](int a, int b) { q(b) = q_prev(a); });
  return q;
}

VectorXd lift_state(const ChainLayout& from, const ChainLayout& to, const VectorXd& x_prev) {
  const int n = from.n();
  if (x_prev.size() != 2 * n) throw ConfigError("lift: state has wrong length");
  VectorXd x(2 * to.n());
  x << lift_configuration(from, to, x_prev.head(n)), lift_configuration(from, to, x_prev.tail(n));
  return x;
}

MatrixXd lift_gain(const ChainLayout& from, const ChainLayout& to, const MatrixXd& L_prev) {
  const int n0 = from.n(), n1 = to.n();
  if (L_prev.cols() != 2 * n0) throw ConfigError("lift: gain has wrong column count");
  MatrixXd L = MatrixXd::Zero(L_prev.rows(), 2 * n1);
  for_shared_coordinates(from, to, [&](int a, int b) {
    L.col(b) = L_prev.col(a);
    L.col(n1 + b) = L_prev.col(n0 + a);
  });
  return L;
}

std::vector<VectorXd> lift_control(const ChainLayout& from, const ChainLayout& to,
                                   const std::vector<VectorXd>& us_prev,
                                   const ControlBounds& bounds) {
  if (from.m() != to.m() || bounds.m() != to.m()) {
    throw ConfigError("lift: control dimension differs between stages");
  }
  std::vector<VectorXd> us;
  us.reserve(us_prev.size());
  for (const VectorXd& u : us_prev) {
    if (u.size() != to.m()) throw ConfigError("lift: control has wrong length");
    us.push_back(bounds.clamp(u));
  }
  return us;
}

VectorXd static_equilibrium(const GvsModel& model, const VectorXd& joint_values, double tol,
                            int max_iters) {
  const ChainLayout& layout = model.layout();
  const int n = layout.n();
  const std::vector<int> joints = layout.joint_coordinates();
  if (joint_values.size() != static_cast<Eigen::Index>(joints.size())) {
    throw ConfigError("static_equilibrium: need one value per joint");
  }
  VectorXd q = VectorXd::Zero(n);
  std::vector<bool> is_joint(n, false);
  for (std::size_t i = 0; i < joints.size(); ++i) {
    q(joints[i]) = joint_values(static_cast<Eigen::Index>(i));
    is_joint[joints[i]] = true;
  }
  std::vector<int> soft;
  for (int i = 0; i < n; ++i) {
    if (!is_joint[i]) soft.push_back(i);
  }
  if (soft.empty()) return q;
  const int ns = static_cast<int>(soft.size());
  const VectorXd zero = VectorXd::Zero(n);
  auto residual_of = [&](const VectorXd& qq) {
    const VectorXd hq = model.assemble<double>(qq, zero).h;
    VectorXd r(ns);
    for (int i = 0; i < ns; ++i) r(i) = hq(soft[i]);
    return r;
  };
  VectorXd r = residual_of(q);
  double rn = r.lpNorm<Eigen::Infinity>();
  using D = Dual<double>;
  const VectorX<D> zero_d = VectorX<D>::Constant(n, D(0.0));
  for (int it = 0; it < max_iters && rn >= tol; ++it) {
    MatrixXd J(ns, ns);
    for (int j = 0; j < ns; ++j) {
      VectorX<D> qd(n);
      for (int k = 0; k < n; ++k) qd(k) = D(q(k), k == soft[j] ? 1.0 : 0.0);
      const VectorX<D> hd = model.assemble<D>(qd, zero_d).h;
      for (int i = 0; i < ns; ++i) J(i, j) = hd(soft[i]).d;
    }
    const VectorXd step = J.partialPivLu().solve(-r);
    double alpha = 1.0;
    bool improved = false;
    while (alpha > 1e-8) {
      VectorXd trial = q;
      for (int i = 0; i < ns; ++i) trial(soft[i]) += alpha * step(i);
      const VectorXd rt = residual_of(trial);
      const double rtn = rt.lpNorm<Eigen::Infinity>();
      if (std::isfinite(rtn) && rtn < rn) {
        q = trial;
        r = rt;
        rn = rtn;
        improved = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!improved) break;
  }
  if (!(rn < tol)) {
    throw NumericalError("static_equilibrium: Newton did not converge (residual " +
                         std::to_string(rn) + ")");
  }
  return q;
}

void SwingUpSpec::validate(const GvsModel& model) const {
  const auto nj = static_cast<Eigen::Index>(model.layout().joint_coordinates().size());
  if (!(t_f > 0.0) || N < 1) throw ConfigError("swing-up: t_f and N must be positive");
  if (!(u_max > 0.0)) throw ConfigError("swing-up: u_max must be > 0");
  if (joint_start.size() != nj || joint_target.size() != nj || joint_weight.size() != nj ||
      joint_rate_weight.size() != nj) {
    throw ConfigError("swing-up: joint vectors must have one entry per joint");
  }
  if ((terminal_joint_weight.size() != 0 && terminal_joint_weight.size() != nj) ||
      (terminal_joint_rate_weight.size() != 0 && terminal_joint_rate_weight.size() != nj)) {
    throw ConfigError("swing-up: terminal joint weights must have one entry per joint");
  }
  if (!(control_weight > 0.0)) throw ConfigError("swing-up: control weight must be > 0");
  if (soft_weight < 0.0 || soft_rate_weight < 0.0 || terminal_scale < 0.0 ||
      (joint_weight.array() < 0.0).any() || (joint_rate_weight.array() < 0.0).any()) {
    throw ConfigError("swing-up: weights must be >= 0");
  }
}

OcpProblem SwingUpSpec::build(const GvsModel& model) const {
  validate(model);
  const ChainLayout& layout = model.layout();
  const int n = layout.n();
  const int m = layout.m();
  const std::vector<int> joints = layout.joint_coordinates();
  const VectorXd q0 = static_equilibrium(model, joint_start);
  const VectorXd qt = static_equilibrium(model, joint_target);
  VectorXd x0 = VectorXd::Zero(2 * n), xt = VectorXd::Zero(2 * n);
  x0.head(n) = q0;
  xt.head(n) = qt;

  VectorXd qd = VectorXd::Constant(2 * n, 0.0);
  qd.head(n).setConstant(soft_weight);
  qd.tail(n).setConstant(soft_rate_weight);
  for (std::size_t i = 0; i < joints.size(); ++i) {
    qd(joints[i]) = joint_weight(static_cast<Eigen::Index>(i));
    qd(n + joints[i]) = joint_rate_weight(static_cast<Eigen::Index>(i));
  }
  VectorXd qf = terminal_scale * qd;
  for (std::size_t i = 0; i < joints.size(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    if (terminal_joint_weight.size() != 0) qf(joints[i]) = terminal_joint_weight(ii);
    if (terminal_joint_rate_weight.size() != 0) qf(n + joints[i]) = terminal_joint_rate_weight(ii);
  }
  const VectorXd rd = VectorXd::Constant(m, control_weight);
  return OcpProblem::make(QuadraticCost::diagonal(qd, rd, qf, xt),
                          ControlBounds::symmetric(m, u_max), x0, t_f, N);
}

SwingUpSpec default_cartpole_swingup() {
  SwingUpSpec s;
  s.joint_start = VectorXd::Zero(2);
  s.joint_target = (VectorXd(2) << 0.0, std::numbers::pi).finished();
  s.joint_weight = (VectorXd(2) << 1.0, 1.0).finished();
  s.joint_rate_weight = (VectorXd(2) << 0.1, 0.1).finished();
  s.soft_weight = 0.1;
  s.soft_rate_weight = 0.01;
  s.control_weight = 0.1;
  s.terminal_scale = 1000.0;
  return s;
}

SwingUpSpec default_pendubot_swingup() {
  SwingUpSpec s;
  s.u_max = 10.0;
  s.joint_start = VectorXd::Zero(2);
  s.joint_target = (VectorXd(2) << std::numbers::pi, 0.0).finished();
  s.joint_weight = (VectorXd(2) << 1.0, 1.0).finished();
  s.joint_rate_weight = (VectorXd(2) << 0.1, 0.1).finished();
  s.soft_weight = 0.1;
  s.soft_rate_weight = 0.01;
  s.control_weight = 0.1;
  s.terminal_scale = 1000.0;
  return s;
}

std::vector<VectorXd> warm_controls(const StageOutcome& prev, const ChainLayout& from,
                                    const GvsModel& model, const OcpProblem& prob,
                                    bool feedback) {
  const ChainLayout& to = model.layout();
  std::vector<VectorXd> us = lift_control(from, to, prev.policy.us, prob.bounds);
  if (!feedback || static_cast<int>(prev.policy.xs.size()) != prob.N + 1) return us;
  std::vector<VectorXd> ref;
  ref.reserve(prob.N + 1);
  for (const VectorXd& x : prev.policy.xs) ref.push_back(lift_state(from, to, x));
  ImplicitStepSettings step;
  step.h = prob.h;
  try {
    // Time-varying LQR about the lifted reference on the new model, with
    // the problem's own weights as tracking weights.
    const QuadraticCost& c = prob.cost;
    std::vector<MatrixXd> K(prob.N);
    MatrixXd P = c.Qf;
    for (int k = prob.N - 1; k >= 0; --k) {
      const DiscreteJacobians jac = discrete_jacobians(
          residual_derivatives(model, ref[k], ref[k + 1], us[k], prob.h));
      const MatrixXd PB = P * jac.fu;
      const MatrixXd S = prob.h * c.R + jac.fu.transpose() * PB;
      K[k] = -S.ldlt().solve(PB.transpose() * jac.fx);
      P = prob.h * c.Q + jac.fx.transpose() * P * (jac.fx + jac.fu * K[k]);
      P = 0.5 * (P + P.transpose()).eval();
    }
    std::vector<VectorXd> closed;
    closed.reserve(us.size());
    VectorXd x = prob.x0;
    for (int k = 0; k < prob.N; ++k) {
      const VectorXd u = prob.bounds.clamp(us[k] + K[k] * (x - ref[k]));
      closed.push_back(u);
      x = implicit_step(model, x, u, step).xp;
    }
    return closed;
  } catch (const Error&) {
    return us;
  }
}

LadderResult run_ladder(const std::vector<LadderStage>& ladder, const SwingUpSpec& spec,
                        const std::vector<VectorXd>& u_seed, const LadderSettings& settings) {
  if (ladder.empty()) throw ConfigError("run_ladder: empty ladder");
  for (std::size_t i = 1; i < ladder.size(); ++i) {
    check_nesting(ladder[i - 1].layout, ladder[i].layout);
    if (ladder[i].layout.n() <= ladder[i - 1].layout.n()) {
      throw ConfigError("run_ladder: stages must strictly increase n");
    }
  }
  LadderResult result;
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    const LadderStage& stage = ladder[i];
    try {
      const GvsModel model(stage.layout, stage.name);
      StageOutcome out;
      out.name = stage.name;
      out.n = stage.layout.n();
      out.problem = spec.build(model);
      const OcpProblem& prob = out.problem;
      std::vector<VectorXd> u_init;
      if (i == 0) {
        if (static_cast<int>(u_seed.size()) != prob.N) {
          throw ConfigError("run_ladder: seed must have N controls");
        }
        for (const VectorXd& u : u_seed) u_init.push_back(prob.bounds.clamp(u));
      } else {
        u_init = warm_controls(result.stages.back(), ladder[i - 1].layout, model, prob,
                               settings.feedback_lift);
      }
      ImplicitStepSettings step = settings.iddp.step;
      step.h = prob.h;
      std::vector<VectorXd> xs_init;
      try {
        xs_init = rollout(model, prob.x0, u_init, step);
        out.initial_cost = trajectory_cost(prob, xs_init, u_init, Quadrature::left_rectangle);
      } catch (const IntegrationError&) {
        out.initial_cost = std::numeric_limits<double>::infinity();
      }
      if (settings.solver == LadderSolver::box_iddp) {
        BoxIddpResult r = solve_box_iddp(prob, model, u_init, settings.iddp);
        out.policy = std::move(r.policy);
        out.trace = std::move(r.trace);
      } else {
        const Transcription tr(prob);
        const VectorXd z0 = xs_init.empty() ? z_from_interpolation(tr, u_init)
                                            : tr.pack(xs_init, u_init);
        CollocationResult r = solve_collocation(prob, model, z0, settings.alm);
        out.policy.xs = std::move(r.xs);
        out.policy.us = std::move(r.us);
        out.policy.bounds = prob.bounds;
        out.policy.total_cost = r.cost;
        out.trace = std::move(r.trace);
      }
      result.stages.push_back(std::move(out));
    } catch (const Error& e) {
      result.completed = false;
      result.failed_stage = stage.name;
      result.error = e.what();
      break;
    }
  }
  return result;
}

std::vector<VectorXd> pseudo_random_controls(int N, const ControlBounds& bounds,
                                             std::uint64_t seed, double fraction) {
  std::mt19937_64 rng(seed);
  std::vector<VectorXd> us;
  us.reserve(N);
  for (int k = 0; k < N; ++k) {
    VectorXd u(bounds.m());
    for (int i = 0; i < bounds.m(); ++i) {
      const double half = std::isfinite(bounds.ub(i)) && std::isfinite(bounds.lb(i))
                              ? 0.5 * (bounds.ub(i) - bounds.lb(i))
                              : 1.0;
      std::uniform_real_distribution<double> dist(-fraction * half, fraction * half);
      u(i) = dist(rng);
    }
    us.push_back(bounds.clamp(u));
  }
  return us;
}

}  // namespace softtraj
