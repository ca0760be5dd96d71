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

#include "softtraj/boxqp.hpp"

#include <algorithm>
#include <cmath>

#include "softtraj/errors.hpp"

namespace softtraj {

namespace {

std::vector<int> indices_of(const std::vector<bool>& mask) {
  std::vector<int> idx;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i]) idx.push_back(static_cast<int>(i));
  }
  return idx;
}

MatrixXd sub_block(const MatrixXd& H, const std::vector<int>& rows) {
  MatrixXd out(rows.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows.size(); ++j) out(i, j) = H(rows[i], rows[j]);
  }
  return out;
}

VectorXd clamp(const VectorXd& x, const VectorXd& lb, const VectorXd& ub) {
  return x.cwiseMax(lb).cwiseMin(ub);
}

std::vector<bool> free_set(const VectorXd& x, const VectorXd& grad, const VectorXd& lb,
                           const VectorXd& ub, double tol) {
  std::vector<bool> free(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const bool at_lower = x(i) - lb(i) <= tol && grad(i) > 0.0;
    const bool at_upper = ub(i) - x(i) <= tol && grad(i) < 0.0;
    free[i] = !(at_lower || at_upper);
  }
  return free;
}

}  // namespace

int BoxQpResult::free_count() const {
  return static_cast<int>(std::count(free.begin(), free.end(), true));
}

double boxqp_objective(const MatrixXd& H, const VectorXd& g, const VectorXd& x) {
  return 0.5 * x.dot(H * x) + g.dot(x);
}

BoxQpResult solve_boxqp(const MatrixXd& H, const VectorXd& g, const VectorXd& lb,
                        const VectorXd& ub, const VectorXd& u_init,
                        const BoxQpSettings& settings) {
  const Eigen::Index m = g.size();
  if (H.rows() != m || H.cols() != m || lb.size() != m || ub.size() != m ||
      u_init.size() != m) {
    throw ConfigError("solve_boxqp: dimension mismatch");
  }
  if ((lb.array() > ub.array()).any()) throw ConfigError("solve_boxqp: lb > ub");
  if (!H.allFinite() || !g.allFinite()) throw InputError("solve_boxqp: non-finite data");

  BoxQpResult res;
  res.u_star = clamp(u_init.array().isFinite().select(u_init, VectorXd::Zero(m)), lb, ub);
  res.free.assign(m, true);
  double value = boxqp_objective(H, g, res.u_star);
  std::vector<bool> factored_set;
  bool has_factor = false;
  double old_value = 0.0;

  auto refactor = [&](const std::vector<bool>& free) {
    res.H_free_factor.compute(sub_block(H, indices_of(free)));
    factored_set = free;
    has_factor = true;
    return res.H_free_factor.info() == Eigen::Success;
  };

  res.status = BoxQpStatus::max_iters;
  for (int iter = 0; iter < settings.max_iters; ++iter) {
    res.iterations = iter;
    if (iter > 0 && (old_value - value) < settings.min_rel_improve * std::abs(old_value)) {
      res.status = BoxQpStatus::converged;
      break;
    }
    old_value = value;
    const VectorXd grad = g + H * res.u_star;
    const std::vector<bool> free =
        free_set(res.u_star, grad, lb, ub, settings.clamp_tol);
    res.free = free;
    const std::vector<int> fidx = indices_of(free);
    if (fidx.empty()) {
      refactor(free);
      res.status = BoxQpStatus::converged;
      break;
    }
    if (!has_factor || free != factored_set) {
      if (!refactor(free)) {
        res.status = BoxQpStatus::non_pd_hessian;
        break;
      }
    }
    double gnorm = 0.0;
    for (int i : fidx) gnorm = std::max(gnorm, std::abs(grad(i)));
    if (gnorm < settings.grad_tol) {
      res.status = BoxQpStatus::converged;
      break;
    }
    // Newton step on the free block with clamped coordinates held fixed.
    VectorXd clamped_x = res.u_star;
    for (int i : fidx) clamped_x(i) = 0.0;
    const VectorXd grad_clamped = g + H * clamped_x;
    VectorXd rhs(fidx.size());
    for (std::size_t i = 0; i < fidx.size(); ++i) rhs(i) = grad_clamped(fidx[i]);
    const VectorXd newton = -res.H_free_factor.solve(rhs);
    VectorXd search = VectorXd::Zero(m);
    for (std::size_t i = 0; i < fidx.size(); ++i) {
      search(fidx[i]) = newton(i) - res.u_star(fidx[i]);
    }
    const double sdotg = search.dot(grad);
    if (!(sdotg < 0.0)) {
      res.status = BoxQpStatus::converged;
      break;
    }
    double step = 1.0;
    VectorXd candidate = clamp(res.u_star + step * search, lb, ub);
    double cand_value = boxqp_objective(H, g, candidate);
    while ((cand_value - value) / (step * sdotg) < settings.armijo) {
      step *= settings.step_factor;
      if (step < settings.min_step) break;
      candidate = clamp(res.u_star + step * search, lb, ub);
      cand_value = boxqp_objective(H, g, candidate);
    }
    if (step < settings.min_step) {
      res.status = BoxQpStatus::line_search_failed;
      break;
    }
    res.u_star = candidate;
    value = cand_value;
    res.iterations = iter + 1;
  }

  // Report the active set and factor that belong to the returned point.
  if (res.status != BoxQpStatus::non_pd_hessian) {
    const VectorXd grad = g + H * res.u_star;
    res.free = free_set(res.u_star, grad, lb, ub, settings.clamp_tol);
    if (!has_factor || res.free != factored_set) {
      if (!refactor(res.free)) res.status = BoxQpStatus::non_pd_hessian;
    }
  }
  res.objective = boxqp_objective(H, g, res.u_star);
  return res;
}

MatrixXd feedback_gains(const BoxQpResult& result, const MatrixXd& Qux) {
  const Eigen::Index m = static_cast<Eigen::Index>(result.free.size());
  if (Qux.rows() != m) throw ConfigError("feedback_gains: Qux has wrong row count");
  if (result.status == BoxQpStatus::non_pd_hessian) {
    throw NumericalError("feedback_gains: free block is not positive definite");
  }
  MatrixXd L = MatrixXd::Zero(m, Qux.cols());
  const std::vector<int> fidx = indices_of(result.free);
  if (fidx.empty()) return L;
  if (result.H_free_factor.rows() != static_cast<Eigen::Index>(fidx.size())) {
    throw NumericalError("feedback_gains: factorization does not match the free set");
  }
  MatrixXd rhs(fidx.size(), Qux.cols());
  for (std::size_t i = 0; i < fidx.size(); ++i) rhs.row(i) = Qux.row(fidx[i]);
  const MatrixXd Lf = -result.H_free_factor.solve(rhs);
  for (std::size_t i = 0; i < fidx.size(); ++i) L.row(fidx[i]) = Lf.row(i);
  return L;
}

}  // namespace softtraj
