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

#include "softtraj/collocation.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/SparseCholesky>

#include "softtraj/integrator.hpp"

namespace softtraj {

namespace {

using Triplet = Eigen::Triplet<double>;
using Clock = std::chrono::steady_clock;

// Quadrature weight of node j in the trapezoid sum.
double node_weight(const Transcription& tr, int j) {
  return (j == 0 || j == tr.N()) ? 0.5 * tr.h() : tr.h();
}

std::vector<FirstOrder> node_derivatives(const Transcription& tr, const DynamicsModel& model,
                                         const VectorXd& z) {
  std::vector<FirstOrder> out(tr.N() + 1);
  for (int j = 0; j <= tr.N(); ++j) {
    try {
      out[j] = model.jac_f(z.segment(tr.x_offset(j), tr.nx()), z.segment(tr.u_offset(j), tr.nu()));
    } catch (const Error& e) {
      throw NumericalError("collocation node " + std::to_string(j) + ": " + e.what());
    }
  }
  return out;
}

VectorXd defects_from(const Transcription& tr, const VectorXd& z, const std::vector<VectorXd>& f) {
  VectorXd d(tr.defect_count());
  const int nx = tr.nx();
  for (int k = 0; k < tr.N(); ++k) {
    d.segment(static_cast<Eigen::Index>(k) * nx, nx) =
        z.segment(tr.x_offset(k + 1), nx) - z.segment(tr.x_offset(k), nx) -
        0.5 * tr.h() * (f[k] + f[k + 1]);
  }
  return d;
}

std::vector<VectorXd> node_values(const Transcription& tr, const DynamicsModel& model,
                                  const VectorXd& z) {
  std::vector<VectorXd> f(tr.N() + 1);
  for (int j = 0; j <= tr.N(); ++j) {
    try {
      f[j] = model.eval_f(z.segment(tr.x_offset(j), tr.nx()), z.segment(tr.u_offset(j), tr.nu()));
    } catch (const Error& e) {
      throw NumericalError("collocation node " + std::to_string(j) + ": " + e.what());
    }
  }
  return f;
}

SparseMatrixd jacobian_from(const Transcription& tr, const std::vector<FirstOrder>& d) {
  const int nx = tr.nx();
  const int nu = tr.nu();
  const double hh = 0.5 * tr.h();
  std::vector<Triplet> trip;
  trip.reserve(static_cast<std::size_t>(tr.N()) * (2 * nx * nx + 2 * nx * nu));
  for (int k = 0; k < tr.N(); ++k) {
    const Eigen::Index row = static_cast<Eigen::Index>(k) * nx;
    const Eigen::Index xa = tr.x_offset(k), xb = tr.x_offset(k + 1);
    const Eigen::Index ua = tr.u_offset(k), ub = tr.u_offset(k + 1);
    for (int i = 0; i < nx; ++i) {
      for (int j = 0; j < nx; ++j) {
        const double a = (i == j ? -1.0 : 0.0) - hh * d[k].fx(i, j);
        const double b = (i == j ? 1.0 : 0.0) - hh * d[k + 1].fx(i, j);
        if (a != 0.0) trip.emplace_back(row + i, xa + j, a);
        if (b != 0.0) trip.emplace_back(row + i, xb + j, b);
      }
      for (int j = 0; j < nu; ++j) {
        // Duplicate (row, col) pairs at the last knot are summed by setFromTriplets.
        if (d[k].fu(i, j) != 0.0) trip.emplace_back(row + i, ua + j, -hh * d[k].fu(i, j));
        if (d[k + 1].fu(i, j) != 0.0) trip.emplace_back(row + i, ub + j, -hh * d[k + 1].fu(i, j));
      }
    }
  }
  SparseMatrixd J(tr.defect_count(), tr.dim());
  J.setFromTriplets(trip.begin(), trip.end());
  return J;
}

// Gradient and (constant) Hessian of the trapezoid cost.
void cost_gradient(const Transcription& tr, const VectorXd& z, VectorXd& grad) {
  const QuadraticCost& c = tr.problem().cost;
  grad = VectorXd::Zero(tr.dim());
  for (int j = 0; j <= tr.N(); ++j) {
    const double w = node_weight(tr, j);
    const VectorXd e = z.segment(tr.x_offset(j), tr.nx()) - c.x_target;
    grad.segment(tr.x_offset(j), tr.nx()) += w * (c.Q * e);
    grad.segment(tr.u_offset(j), tr.nu()) += w * (c.R * z.segment(tr.u_offset(j), tr.nu()));
  }
  const VectorXd eN = z.segment(tr.x_offset(tr.N()), tr.nx()) - c.x_target;
  grad.segment(tr.x_offset(tr.N()), tr.nx()) += c.Qf * eN;
}

void add_cost_hessian(const Transcription& tr, std::vector<Triplet>& trip) {
  const QuadraticCost& c = tr.problem().cost;
  auto add_block = [&](Eigen::Index off, const MatrixXd& M, double w) {
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
      for (Eigen::Index j = 0; j < M.cols(); ++j) {
        if (M(i, j) != 0.0) trip.emplace_back(off + i, off + j, w * M(i, j));
      }
    }
  };
  for (int j = 0; j <= tr.N(); ++j) {
    const double w = node_weight(tr, j);
    add_block(tr.x_offset(j), c.Q, w);
    add_block(tr.u_offset(j), c.R, w);
  }
  add_block(tr.x_offset(tr.N()), c.Qf, 1.0);
}

double inf_norm(const VectorXd& v) { return v.size() == 0 ? 0.0 : v.lpNorm<Eigen::Infinity>(); }

struct AlState {
  double merit = 0.0;
  double cost = 0.0;
  VectorXd d;
};

AlState evaluate_al(const Transcription& tr, const DynamicsModel& model, const VectorXd& z,
                    const VectorXd& lambda, double rho) {
  AlState s;
  s.d = defects_from(tr, z, node_values(tr, model, z));
  s.cost = transcription_cost(tr, z);
  s.merit = s.cost + lambda.dot(s.d) + 0.5 * rho * s.d.squaredNorm();
  return s;
}

double projected_gradient_norm(const Transcription& tr, const VectorXd& z, const VectorXd& g) {
  return inf_norm(z - tr.project(z - g));
}

// One augmented-Lagrangian subproblem. Returns the projected-gradient norm
// and adds the number of Gauss-Newton steps taken to `steps`.
double minimize_al(const Transcription& tr, const DynamicsModel& model, VectorXd& z,
                   const VectorXd& lambda, double rho, const AlmSettings& settings,
                   double& damping, int& steps) {
  const Eigen::Index nz = tr.dim();
  AlState cur = evaluate_al(tr, model, z, lambda, rho);
  double pg = std::numeric_limits<double>::infinity();
  std::vector<Triplet> hess_cost;
  add_cost_hessian(tr, hess_cost);
  for (int it = 0; it < settings.max_inner; ++it) {
    const std::vector<FirstOrder> nd = node_derivatives(tr, model, z);
    const SparseMatrixd D = jacobian_from(tr, nd);
    VectorXd grad;
    cost_gradient(tr, z, grad);
    grad += D.transpose() * (lambda + rho * cur.d);
    pg = projected_gradient_norm(tr, z, grad);
    if (pg < settings.opt_tol) break;

    SparseMatrixd Hc(nz, nz);
    Hc.setFromTriplets(hess_cost.begin(), hess_cost.end());
    const SparseMatrixd H = Hc + rho * SparseMatrixd(D.transpose() * D);

    // Variables at a bound with the gradient pushing outward stay fixed.
    std::vector<Eigen::Index> free_index(nz, -1);
    std::vector<Eigen::Index> free_vars;
    for (Eigen::Index i = 0; i < nz; ++i) {
      const bool pinned = tr.lower()(i) == tr.upper()(i);
      const bool at_lower = z(i) <= tr.lower()(i) && grad(i) > 0.0;
      const bool at_upper = z(i) >= tr.upper()(i) && grad(i) < 0.0;
      if (!(pinned || at_lower || at_upper)) {
        free_index[i] = static_cast<Eigen::Index>(free_vars.size());
        free_vars.push_back(i);
      }
    }
    const Eigen::Index nf = static_cast<Eigen::Index>(free_vars.size());
    if (nf == 0) break;
    std::vector<Triplet> ff;
    ff.reserve(H.nonZeros());
    for (int col = 0; col < H.outerSize(); ++col) {
      if (free_index[col] < 0) continue;
      for (SparseMatrixd::InnerIterator itH(H, col); itH; ++itH) {
        if (free_index[itH.row()] >= 0) {
          ff.emplace_back(free_index[itH.row()], free_index[col], itH.value());
        }
      }
    }
    VectorXd gf(nf);
    for (Eigen::Index i = 0; i < nf; ++i) gf(i) = grad(free_vars[i]);

    bool stepped = false;
    for (int attempt = 0; attempt < 12 && !stepped; ++attempt) {
      std::vector<Triplet> damped = ff;
      for (Eigen::Index i = 0; i < nf; ++i) damped.emplace_back(i, i, damping);
      SparseMatrixd Hf(nf, nf);
      Hf.setFromTriplets(damped.begin(), damped.end());
      Eigen::SimplicialLDLT<SparseMatrixd> ldlt(Hf);
      if (ldlt.info() != Eigen::Success) {
        damping = std::max(damping * 10.0, 1e-8);
        continue;
      }
      const VectorXd step_f = ldlt.solve(-gf);
      if (!step_f.allFinite()) {
        damping = std::max(damping * 10.0, 1e-8);
        continue;
      }
      VectorXd step = VectorXd::Zero(nz);
      for (Eigen::Index i = 0; i < nf; ++i) step(free_vars[i]) = step_f(i);
      for (double alpha = 1.0; alpha > 1e-6; alpha *= 0.5) {
        const VectorXd trial = tr.project(z + alpha * step);
        AlState next;
        try {
          next = evaluate_al(tr, model, trial, lambda, rho);
        } catch (const NumericalError&) {
          continue;
        }
        if (!std::isfinite(next.merit)) continue;
        const double predicted = grad.dot(trial - z);
        if (next.merit <= cur.merit + 1e-4 * predicted && next.merit < cur.merit) {
          z = trial;
          cur = std::move(next);
          stepped = true;
          break;
        }
      }
      if (stepped) {
        damping = damping / 3.0 < 1e-10 ? 0.0 : damping / 3.0;
      } else {
        damping = std::max(damping * 10.0, 1e-8);
      }
    }
    ++steps;
    if (!stepped) break;
  }
  return pg;
}

}  // namespace

Transcription::Transcription(const OcpProblem& prob)
    : prob_(prob), nx_(prob.state_dim()), nu_(prob.control_dim()), N_(prob.N), h_(prob.h) {
  prob_.validate();
  const double inf = std::numeric_limits<double>::infinity();
  lower_ = VectorXd::Constant(dim(), -inf);
  upper_ = VectorXd::Constant(dim(), inf);
  lower_.segment(0, nx_) = prob_.x0;
  upper_.segment(0, nx_) = prob_.x0;
  for (int k = 0; k < N_; ++k) {
    lower_.segment(u_offset(k), nu_) = prob_.bounds.lb;
    upper_.segment(u_offset(k), nu_) = prob_.bounds.ub;
  }
}

Eigen::Index Transcription::u_offset(int k) const {
  const int kk = std::min(k, N_ - 1);
  return static_cast<Eigen::Index>(nx_) * (N_ + 1) + static_cast<Eigen::Index>(kk) * nu_;
}

VectorXd Transcription::pack(const std::vector<VectorXd>& xs,
                             const std::vector<VectorXd>& us) const {
  if (static_cast<int>(xs.size()) != N_ + 1 || static_cast<int>(us.size()) != N_) {
    throw ConfigError("transcription: trajectory length does not match N");
  }
  VectorXd z(dim());
  for (int k = 0; k <= N_; ++k) {
    if (xs[k].size() != nx_) throw ConfigError("transcription: state has wrong length");
    z.segment(x_offset(k), nx_) = xs[k];
  }
  for (int k = 0; k < N_; ++k) {
    if (us[k].size() != nu_) throw ConfigError("transcription: control has wrong length");
    z.segment(u_offset(k), nu_) = us[k];
  }
  return z;
}

void Transcription::unpack(const VectorXd& z, std::vector<VectorXd>& xs,
                           std::vector<VectorXd>& us) const {
  if (z.size() != dim()) throw ConfigError("transcription: z has wrong length");
  xs.resize(N_ + 1);
  us.resize(N_);
  for (int k = 0; k <= N_; ++k) xs[k] = z.segment(x_offset(k), nx_);
  for (int k = 0; k < N_; ++k) us[k] = z.segment(u_offset(k), nu_);
}

VectorXd Transcription::project(const VectorXd& z) const {
  return z.cwiseMax(lower_).cwiseMin(upper_);
}

VectorXd defects(const Transcription& tr, const DynamicsModel& model, const VectorXd& z) {
  if (z.size() != tr.dim()) throw ConfigError("defects: z has wrong length");
  return defects_from(tr, z, node_values(tr, model, z));
}

SparseMatrixd defect_jacobian(const Transcription& tr, const DynamicsModel& model,
                              const VectorXd& z) {
  if (z.size() != tr.dim()) throw ConfigError("defect_jacobian: z has wrong length");
  return jacobian_from(tr, node_derivatives(tr, model, z));
}

double transcription_cost(const Transcription& tr, const VectorXd& z) {
  std::vector<VectorXd> xs, us;
  tr.unpack(z, xs, us);
  return trajectory_cost(tr.problem(), xs, us, Quadrature::trapezoid);
}

void AlmSettings::validate() const {
  if (!(penalty_init > 0.0)) throw ConfigError("alm: penalty_init must be > 0");
  if (!(penalty_scale > 1.0)) throw ConfigError("alm: penalty_scale must be > 1");
  if (!(constraint_tol > 0.0 && opt_tol > 0.0)) throw ConfigError("alm: tolerances must be > 0");
  if (max_outer < 0 || max_inner < 1) throw ConfigError("alm: invalid iteration limits");
  if (!(multiplier_clamp > 0.0)) throw ConfigError("alm: multiplier_clamp must be > 0");
}

CollocationResult solve_collocation(const OcpProblem& prob, const DynamicsModel& model,
                                    const VectorXd& z_init, const AlmSettings& settings) {
  settings.validate();
  const Transcription tr(prob);
  if (model.state_dim() != tr.nx() || model.control_dim() != tr.nu()) {
    throw ConfigError("collocation: model dimensions do not match the problem");
  }
  if (z_init.size() != tr.dim()) throw ConfigError("collocation: z_init has wrong length");
  if (!z_init.allFinite()) throw InputError("collocation: z_init is not finite");

  CollocationResult res;
  VectorXd z = tr.project(z_init);
  VectorXd lambda = VectorXd::Zero(tr.defect_count());
  double rho = settings.penalty_init;
  double damping = 0.0;
  double prev_violation = inf_norm(defects(tr, model, z));
  res.trace.status = SolverStatus::max_iterations;

  VectorXd best_z;
  double best_cost = std::numeric_limits<double>::infinity();
  double best_violation = std::numeric_limits<double>::infinity();
  for (int outer = 0; outer < settings.max_outer; ++outer) {
    const auto t0 = Clock::now();
    const VectorXd z_before = z;
    const double pg = minimize_al(tr, model, z, lambda, rho, settings, damping, res.inner_steps);
    const VectorXd d = defects(tr, model, z);
    const double violation = inf_norm(d);
    IterationRecord rec;
    rec.cost = transcription_cost(tr, z);
    rec.merit = rec.cost + lambda.dot(d) + 0.5 * rho * d.squaredNorm();
    rec.gradient_norm = pg;
    rec.constraint_violation = violation;
    rec.regularization = rho;
    rec.accepted = (z - z_before).lpNorm<Eigen::Infinity>() > 0.0;
    rec.alpha = 1.0;
    // Best feasible so far: lowest cost among iterates within tolerance,
    // otherwise lowest violation.
    const bool feasible = violation < settings.constraint_tol;
    const bool best_feasible = best_violation < settings.constraint_tol;
    if ((feasible && (!best_feasible || rec.cost < best_cost)) ||
        (!feasible && !best_feasible && violation < best_violation)) {
      best_z = z;
      best_cost = rec.cost;
      best_violation = violation;
    }
    const bool done = feasible && pg < settings.opt_tol;
    if (!done) {
      lambda = (lambda + rho * d)
                   .cwiseMax(-settings.multiplier_clamp)
                   .cwiseMin(settings.multiplier_clamp);
      // Once feasible, a stalled ratio is round-off; raising the penalty
      // further would only spoil the conditioning.
      if (!feasible && violation > 0.25 * prev_violation) {
        rho = std::min(rho * settings.penalty_scale, settings.penalty_max);
      }
      prev_violation = violation;
    }
    rec.wall_time = std::chrono::duration<double>(Clock::now() - t0).count();
    res.trace.append(rec);
    if (done) {
      res.trace.status = SolverStatus::converged;
      break;
    }
  }
  if (res.trace.status != SolverStatus::converged && best_z.size() == z.size()) z = best_z;
  res.z = z;
  res.multipliers = lambda;
  tr.unpack(z, res.xs, res.us);
  res.cost = transcription_cost(tr, z);
  res.defect_norm = inf_norm(defects(tr, model, z));
  return res;
}

VectorXd z_from_rollout(const Transcription& tr, const DynamicsModel& model,
                        const std::vector<VectorXd>& us) {
  if (static_cast<int>(us.size()) != tr.N()) throw ConfigError("z_from_rollout: need N controls");
  std::vector<VectorXd> clamped;
  for (const VectorXd& u : us) clamped.push_back(tr.problem().bounds.clamp(u));
  std::vector<VectorXd> xs{tr.problem().x0};
  for (int k = 0; k < tr.N(); ++k) {
    VectorXd next = rk4_step(model, xs.back(), clamped[k], tr.h());
    if (!next.allFinite()) next = xs.back();
    xs.push_back(std::move(next));
  }
  return tr.pack(xs, clamped);
}

VectorXd z_from_interpolation(const Transcription& tr, const std::vector<VectorXd>& us) {
  if (static_cast<int>(us.size()) != tr.N()) {
    throw ConfigError("z_from_interpolation: need N controls");
  }
  const VectorXd& x0 = tr.problem().x0;
  const VectorXd& xt = tr.problem().cost.x_target;
  std::vector<VectorXd> xs;
  for (int k = 0; k <= tr.N(); ++k) {
    const double s = static_cast<double>(k) / tr.N();
    xs.push_back((1.0 - s) * x0 + s * xt);
  }
  std::vector<VectorXd> clamped;
  for (const VectorXd& u : us) clamped.push_back(tr.problem().bounds.clamp(u));
  return tr.pack(xs, clamped);
}

}  // namespace softtraj
