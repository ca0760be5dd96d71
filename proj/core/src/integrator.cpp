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

#include "softtraj/integrator.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/LU>

namespace softtraj {

namespace {

double inf_norm(const VectorXd& v) {
  return v.size() == 0 ? 0.0 : v.lpNorm<Eigen::Infinity>();
}

// Residual at a trial point; non-finite or failed evaluations map to +inf so
// that the line search backs off.
double trial_residual(const DynamicsModel& model, const VectorXd& x,
                      const VectorXd& xp, const VectorXd& u, double h,
                      VectorXd& g) {
  if (!xp.allFinite()) return std::numeric_limits<double>::infinity();
  try {
    g = xp - x - h * model.eval_f(xp, u);
  } catch (const NumericalError&) {
    return std::numeric_limits<double>::infinity();
  } catch (const InputError&) {
    return std::numeric_limits<double>::infinity();
  }
  const double r = inf_norm(g);
  return std::isfinite(r) ? r : std::numeric_limits<double>::infinity();
}

}  // namespace

void ImplicitStepSettings::validate() const {
  if (!(h > 0.0)) throw ConfigError("implicit step: h must be > 0");
  if (!(newton_tol > 0.0)) throw ConfigError("implicit step: newton_tol must be > 0");
  if (max_newton_iters < 1) throw ConfigError("implicit step: max_newton_iters must be >= 1");
  if (!(backtrack > 0.0 && backtrack < 1.0)) {
    throw ConfigError("implicit step: backtrack factor must lie in (0, 1)");
  }
  if (!(min_alpha > 0.0 && min_alpha <= 1.0)) {
    throw ConfigError("implicit step: min_alpha must lie in (0, 1]");
  }
}

VectorXd residual(const DynamicsModel& model, const VectorXd& x,
                  const VectorXd& xp, const VectorXd& u, double h) {
  if (x.size() != model.state_dim() || xp.size() != model.state_dim()) {
    throw ConfigError("residual: state has wrong length");
  }
  if (!x.allFinite() || !xp.allFinite() || !u.allFinite()) {
    throw InputError("residual: non-finite input");
  }
  return xp - x - h * model.eval_f(xp, u);
}

namespace {

// Damped Newton from xp. The line search merit is the Euclidean residual
// norm; convergence is judged in the infinity norm.
bool newton_solve(const DynamicsModel& model, const VectorXd& x, const VectorXd& u,
                  const ImplicitStepSettings& settings, StepResult& out) {
  const double h = settings.h;
  const Eigen::Index nx = x.size();
  VectorXd g;
  double r = trial_residual(model, x, out.xp, u, h, g);
  if (!std::isfinite(r)) return false;
  double merit = g.norm();
  while (r >= settings.newton_tol) {
    if (out.newton_iters >= settings.max_newton_iters) break;
    const FirstOrder d = model.jac_f(out.xp, u);
    const MatrixXd G = MatrixXd::Identity(nx, nx) - h * d.fx;
    const VectorXd dx = -G.partialPivLu().solve(g);
    if (!dx.allFinite()) break;
    ++out.newton_iters;
    double alpha = 1.0;
    VectorXd g_trial;
    VectorXd x_trial = out.xp + dx;
    double r_trial = trial_residual(model, x, x_trial, u, h, g_trial);
    double m_trial = std::isfinite(r_trial) ? g_trial.norm() : r_trial;
    if (settings.line_search) {
      while (!(m_trial < merit) && alpha > settings.min_alpha) {
        alpha *= settings.backtrack;
        x_trial = out.xp + alpha * dx;
        r_trial = trial_residual(model, x, x_trial, u, h, g_trial);
        m_trial = std::isfinite(r_trial) ? g_trial.norm() : r_trial;
      }
      if (!(m_trial < merit)) break;
    } else if (!std::isfinite(r_trial)) {
      break;
    }
    out.xp = std::move(x_trial);
    g = std::move(g_trial);
    r = r_trial;
    merit = m_trial;
  }
  out.residual_norm = r;
  return r < settings.newton_tol;
}

}  // namespace

StepResult implicit_step(const DynamicsModel& model, const VectorXd& x,
                         const VectorXd& u, const ImplicitStepSettings& settings,
                         const std::optional<VectorXd>& guess) {
  settings.validate();
  if (!x.allFinite() || !u.allFinite()) {
    throw InputError("implicit_step: non-finite state or control");
  }
  StepResult out;
  const bool use_guess = guess && guess->size() == x.size() && guess->allFinite();
  out.xp = use_guess ? *guess : VectorXd(x + settings.h * model.eval_f(x, u));
  if (newton_solve(model, x, u, settings, out)) return out;
  // Retry once from the current state, which is the root for h -> 0.
  StepResult retry;
  retry.xp = x;
  retry.newton_iters = 0;
  const bool ok = newton_solve(model, x, u, settings, retry);
  retry.newton_iters += out.newton_iters;
  if (ok) return retry;
  throw IntegrationError("implicit step: Newton did not converge",
                         std::min(out.residual_norm, retry.residual_norm));
}

StepResult implicit_step_chord(const DynamicsModel& model, const VectorXd& x,
                               const VectorXd& u, const ImplicitStepSettings& settings,
                               const VectorXd& guess,
                               const Eigen::PartialPivLU<MatrixXd>& newton_matrix,
                               int max_chord_iters) {
  settings.validate();
  if (!x.allFinite() || !u.allFinite()) {
    throw InputError("implicit_step: non-finite state or control");
  }
  if (guess.size() != x.size() || newton_matrix.rows() != x.size()) {
    return implicit_step(model, x, u, settings);
  }
  StepResult out;
  out.xp = guess;
  VectorXd g;
  double r = trial_residual(model, x, out.xp, u, settings.h, g);
  if (!std::isfinite(r)) return implicit_step(model, x, u, settings);
  for (int it = 0; it < max_chord_iters && r >= settings.newton_tol; ++it) {
    const VectorXd trial = out.xp - newton_matrix.solve(g);
    VectorXd g_trial;
    const double r_trial = trial_residual(model, x, trial, u, settings.h, g_trial);
    if (!(r_trial < r)) break;
    out.xp = trial;
    g = std::move(g_trial);
    r = r_trial;
    ++out.newton_iters;
  }
  if (r < settings.newton_tol) {
    out.residual_norm = r;
    return out;
  }
  StepResult exact = implicit_step(model, x, u, settings, out.xp);
  exact.newton_iters += out.newton_iters;
  return exact;
}

ResidualDerivatives residual_derivatives(const DynamicsModel& model,
                                         const VectorXd& x, const VectorXd& xp,
                                         const VectorXd& u, double h, int order,
                                         HessianMode mode) {
  if (order != 1 && order != 2) throw ConfigError("residual_derivatives: order must be 1 or 2");
  if (x.size() != xp.size()) throw ConfigError("residual_derivatives: state length mismatch");
  const Eigen::Index nx = x.size();
  if (order == 2 && !model.has_second_order()) {
    throw UnsupportedOperation("model " + model.name() + " has no second-order derivatives");
  }
  const FirstOrder d = model.jac_f(xp, u);
  ResidualDerivatives rd;
  rd.order = order;
  rd.g_xp = MatrixXd::Identity(nx, nx) - h * d.fx;
  rd.g_x = -MatrixXd::Identity(nx, nx);
  rd.g_u = -h * d.fu;
  if (order == 2) {
    const SecondOrder s = model.hess_f(xp, u, mode);
    rd.g_xpxp.resize(nx);
    rd.g_uu.resize(nx);
    rd.g_xpu.resize(nx);
    for (Eigen::Index a = 0; a < nx; ++a) {
      rd.g_xpxp[a] = -h * s.fxx[a];
      rd.g_uu[a] = -h * s.fuu[a];
      rd.g_xpu[a] = -h * s.fxu[a];
    }
  }
  return rd;
}

DiscreteJacobians discrete_jacobians(const ResidualDerivatives& rd) {
  Eigen::FullPivLU<MatrixXd> lu(rd.g_xp);
  if (!lu.isInvertible()) {
    throw NumericalError("discrete_jacobians: g_x' is singular");
  }
  return DiscreteJacobians{-lu.solve(rd.g_x), -lu.solve(rd.g_u)};
}

DiscreteHessians discrete_hessians(const ResidualDerivatives& rd,
                                   const DiscreteJacobians& jac) {
  if (rd.order < 2 || rd.g_xpxp.empty()) {
    throw UnsupportedOperation("discrete_hessians: second-order residual blocks missing");
  }
  const Eigen::Index nx = rd.g_xp.rows();
  const Eigen::Index nu = rd.g_u.cols();
  const MatrixXd& fx = jac.fx;
  const MatrixXd& fu = jac.fu;
  // Contractions of the residual Hessians with the step sensitivities,
  // one per residual component; g_x'x = g_xx = 0 and g_xu = 0 here.
  std::vector<MatrixXd> cxx(nx), cuu(nx), cxu(nx);
  for (Eigen::Index a = 0; a < nx; ++a) {
    const MatrixXd Gp_fu = rd.g_xpxp[a] * fu;
    cxx[a] = fx.transpose() * rd.g_xpxp[a] * fx;
    cuu[a] = fu.transpose() * Gp_fu + fu.transpose() * rd.g_xpu[a] +
             rd.g_xpu[a].transpose() * fu + rd.g_uu[a];
    cxu[a] = fx.transpose() * Gp_fu + fx.transpose() * rd.g_xpu[a];
  }
  const MatrixXd Ginv = rd.g_xp.partialPivLu().inverse();
  DiscreteHessians out;
  out.Fxx.assign(nx, MatrixXd::Zero(nx, nx));
  out.Fuu.assign(nx, MatrixXd::Zero(nu, nu));
  out.Fxu.assign(nx, MatrixXd::Zero(nx, nu));
  for (Eigen::Index i = 0; i < nx; ++i) {
    for (Eigen::Index a = 0; a < nx; ++a) {
      const double w = Ginv(i, a);
      if (w == 0.0) continue;
      out.Fxx[i] -= w * cxx[a];
      out.Fuu[i] -= w * cuu[a];
      out.Fxu[i] -= w * cxu[a];
    }
  }
  return out;
}

VectorXd rk4_step(const DynamicsModel& model, const VectorXd& x,
                  const VectorXd& u, double h) {
  const VectorXd k1 = model.eval_f(x, u);
  const VectorXd k2 = model.eval_f(x + 0.5 * h * k1, u);
  const VectorXd k3 = model.eval_f(x + 0.5 * h * k2, u);
  const VectorXd k4 = model.eval_f(x + h * k3, u);
  return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

std::vector<VectorXd> rollout(const DynamicsModel& model, const VectorXd& x0,
                              const std::vector<VectorXd>& us,
                              const ImplicitStepSettings& settings, Scheme scheme) {
  settings.validate();
  if (x0.size() != model.state_dim()) throw ConfigError("rollout: x0 has wrong length");
  std::vector<VectorXd> xs;
  xs.reserve(us.size() + 1);
  xs.push_back(x0);
  for (std::size_t k = 0; k < us.size(); ++k) {
    const int step = static_cast<int>(k);
    if (scheme == Scheme::implicit_euler) {
      try {
        xs.push_back(implicit_step(model, xs.back(), us[k], settings).xp);
      } catch (const IntegrationError& e) {
        throw IntegrationError(std::string(e.what()) + " at step " + std::to_string(step),
                               e.residual_norm(), step);
      }
    } else {
      VectorXd next;
      try {
        next = rk4_step(model, xs.back(), us[k], settings.h);
      } catch (const InputError&) {
        next = VectorXd::Constant(x0.size(), std::numeric_limits<double>::quiet_NaN());
      } catch (const NumericalError&) {
        next = VectorXd::Constant(x0.size(), std::numeric_limits<double>::quiet_NaN());
      }
      if (!next.allFinite()) {
        throw IntegrationError("rk4: non-finite state at step " + std::to_string(step),
                               std::numeric_limits<double>::infinity(), step);
      }
      xs.push_back(std::move(next));
    }
  }
  return xs;
}

}  // namespace softtraj
