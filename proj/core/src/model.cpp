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

#include "softtraj/model.hpp"

#include <algorithm>
#include <random>
#include <sstream>

#include "softtraj/linalg.hpp"

namespace softtraj {

void DynamicsModel::check_inputs(const VectorXd& x, const VectorXd& u) const {
  if (x.size() != state_dim() || u.size() != control_dim()) {
    std::ostringstream msg;
    msg << name() << ": expected state/control of length " << state_dim()
        << "/" << control_dim() << ", got " << x.size() << "/" << u.size();
    throw ConfigError(msg.str());
  }
  if (!x.allFinite() || !u.allFinite()) {
    throw InputError(name() + ": non-finite state or control");
  }
}

SecondOrder DynamicsModel::hess_f(const VectorXd&, const VectorXd&,
                                  HessianMode) const {
  throw UnsupportedOperation(name() + " does not provide second derivatives");
}

FirstOrder finite_difference_jacobian(const DynamicsModel& model,
                                      const VectorXd& x, const VectorXd& u,
                                      double step) {
  const Eigen::Index nx = x.size();
  const Eigen::Index nu = u.size();
  FirstOrder out{model.eval_f(x, u), MatrixXd(nx, nx), MatrixXd(nx, nu)};
  for (Eigen::Index j = 0; j < nx; ++j) {
    const double e = step * std::max(1.0, std::abs(x(j)));
    VectorXd xp = x, xm = x;
    xp(j) += e;
    xm(j) -= e;
    out.fx.col(j) = (model.eval_f(xp, u) - model.eval_f(xm, u)) / (2.0 * e);
  }
  for (Eigen::Index j = 0; j < nu; ++j) {
    const double e = step * std::max(1.0, std::abs(u(j)));
    VectorXd up = u, um = u;
    up(j) += e;
    um(j) -= e;
    out.fu.col(j) = (model.eval_f(x, up) - model.eval_f(x, um)) / (2.0 * e);
  }
  return out;
}

SecondOrder finite_difference_hessian(const DynamicsModel& model,
                                      const VectorXd& x, const VectorXd& u,
                                      double step) {
  const Eigen::Index nx = x.size();
  const Eigen::Index nu = u.size();
  SecondOrder out;
  out.fxx.assign(nx, MatrixXd::Zero(nx, nx));
  out.fuu.assign(nx, MatrixXd::Zero(nu, nu));
  out.fxu.assign(nx, MatrixXd::Zero(nx, nu));
  for (Eigen::Index j = 0; j < nx; ++j) {
    const double e = step * std::max(1.0, std::abs(x(j)));
    VectorXd xp = x, xm = x;
    xp(j) += e;
    xm(j) -= e;
    const FirstOrder jp = model.jac_f(xp, u);
    const FirstOrder jm = model.jac_f(xm, u);
    const MatrixXd dfx = (jp.fx - jm.fx) / (2.0 * e);
    for (Eigen::Index i = 0; i < nx; ++i) out.fxx[i].col(j) = dfx.row(i);
  }
  for (Eigen::Index j = 0; j < nu; ++j) {
    const double e = step * std::max(1.0, std::abs(u(j)));
    VectorXd up = u, um = u;
    up(j) += e;
    um(j) -= e;
    const FirstOrder jp = model.jac_f(x, up);
    const FirstOrder jm = model.jac_f(x, um);
    const MatrixXd dfx = (jp.fx - jm.fx) / (2.0 * e);
    const MatrixXd dfu = (jp.fu - jm.fu) / (2.0 * e);
    for (Eigen::Index i = 0; i < nx; ++i) {
      out.fxu[i].col(j) = dfx.row(i).transpose();
      out.fuu[i].col(j) = dfu.row(i).transpose();
    }
  }
  for (Eigen::Index i = 0; i < nx; ++i) {
    out.fxx[i] = symmetrized(out.fxx[i]);
    out.fuu[i] = symmetrized(out.fuu[i]);
  }
  return out;
}

LinearModel::LinearModel(MatrixXd A, MatrixXd B, bool mechanical)
    : A_(std::move(A)), B_(std::move(B)), mechanical_(mechanical) {
  if (A_.rows() != A_.cols() || B_.rows() != A_.rows()) {
    throw ConfigError("linear model: A must be square and B must match rows");
  }
  if (mechanical_ && A_.rows() % 2 != 0) {
    throw ConfigError("linear model: mechanical models need even state size");
  }
}

std::shared_ptr<LinearModel> make_double_integrator(int axes) {
  const int nx = 2 * axes;
  MatrixXd A = MatrixXd::Zero(nx, nx);
  A.topRightCorner(axes, axes).setIdentity();
  MatrixXd B = MatrixXd::Zero(nx, axes);
  B.bottomRows(axes).setIdentity();
  return std::make_shared<LinearModel>(A, B, true);
}

namespace {

VectorXd broadcast(const VectorXd& range, Eigen::Index n) {
  if (range.size() == n) return range;
  if (range.size() == 1) return VectorXd::Constant(n, range(0));
  throw ConfigError("derivative check: sampling range has wrong length");
}

// Directional derivative of [fx | fu] along dz predicted by the Hessian.
MatrixXd hessian_contraction(const SecondOrder& H, const VectorXd& dx,
                             const VectorXd& du) {
  const Eigen::Index nx = dx.size();
  const Eigen::Index nu = du.size();
  MatrixXd out(nx, nx + nu);
  for (Eigen::Index i = 0; i < nx; ++i) {
    out.row(i).head(nx) = (H.fxx[i] * dx + H.fxu[i] * du).transpose();
    if (nu > 0) {
      out.row(i).tail(nu) =
          (H.fxu[i].transpose() * dx + H.fuu[i] * du).transpose();
    }
  }
  return out;
}

MatrixXd stacked_jacobian(const FirstOrder& j) {
  MatrixXd out(j.fx.rows(), j.fx.cols() + j.fu.cols());
  out << j.fx, j.fu;
  return out;
}

}  // namespace

DerivativeCheckReport check_derivatives(const DynamicsModel& model,
                                        const DerivativeCheckOptions& options) {
  DerivativeCheckReport report;
  const Eigen::Index nx = model.state_dim();
  const Eigen::Index nu = model.control_dim();
  const VectorXd xr = broadcast(options.x_range, nx);
  const VectorXd ur = broadcast(options.u_range, nu);
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  auto draw = [&](const VectorXd& range) {
    VectorXd v(range.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = range(i) * unit(rng);
    return v;
  };
  const bool with_hessian = options.check_hessian && model.has_second_order();
  report.hessian_checked = with_hessian;
  for (int s = 0; s < std::max(1, options.samples); ++s) {
    const VectorXd x = draw(xr);
    const VectorXd u = draw(ur);
    const MatrixXd J = stacked_jacobian(model.jac_f(x, u));
    const MatrixXd Jfd =
        stacked_jacobian(finite_difference_jacobian(model, x, u, options.fd_step));
    const double scale = std::max(1.0, Jfd.cwiseAbs().maxCoeff());
    Eigen::Index r = 0, c = 0;
    const double err = (J - Jfd).cwiseAbs().maxCoeff(&r, &c) / scale;
    if (err > report.max_jacobian_error || report.worst_jacobian_sample < 0) {
      report.max_jacobian_error = err;
      report.worst_jacobian_sample = s;
      report.worst_row = static_cast<int>(r);
      report.worst_col = static_cast<int>(c);
      report.worst_x = x;
      report.worst_u = u;
    }
    if (with_hessian) {
      const VectorXd dx = draw(VectorXd::Ones(nx));
      const VectorXd du = draw(VectorXd::Ones(nu));
      const MatrixXd predicted = hessian_contraction(
          model.hess_f(x, u, HessianMode::nested_dual), dx, du);
      const double e = options.hessian_fd_step;
      const MatrixXd fd =
          (stacked_jacobian(model.jac_f(x + e * dx, u + e * du)) -
           stacked_jacobian(model.jac_f(x - e * dx, u - e * du))) /
          (2.0 * e);
      const double herr = relative_error(predicted, fd);
      if (herr > report.max_hessian_error || report.worst_hessian_sample < 0) {
        report.max_hessian_error = herr;
        report.worst_hessian_sample = s;
      }
    }
    ++report.samples;
  }
  return report;
}

}  // namespace softtraj
