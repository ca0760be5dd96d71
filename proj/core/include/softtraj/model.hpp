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

// Dynamics-model abstraction consumed by every solver.
//
// A model maps (x, u) to xdot. Mechanical models use x = [q; qdot] and
// return [qdot; M^{-1}(B u - h)]. Derivatives are exact: AutoDiffModel
// differentiates a model's templated evaluation with dual numbers.

#ifndef SOFTTRAJ_MODEL_HPP
#define SOFTTRAJ_MODEL_HPP

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "softtraj/dual.hpp"
#include "softtraj/errors.hpp"

namespace softtraj {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Value and first derivatives of the continuous dynamics.
struct FirstOrder {
  VectorXd f;   // xdot
  MatrixXd fx;  // nx x nx
  MatrixXd fu;  // nx x nu
};

/// Second derivatives of the continuous dynamics, one matrix per output
/// component i: fxx[i] = d2 f_i / dx dx (nx x nx), fuu[i] (nu x nu),
/// fxu[i] = d2 f_i / dx du (nx x nu).
struct SecondOrder {
  std::vector<MatrixXd> fxx;
  std::vector<MatrixXd> fuu;
  std::vector<MatrixXd> fxu;
};

enum class HessianMode { nested_dual, finite_difference };

class DynamicsModel {
 public:
  virtual ~DynamicsModel() = default;

  virtual std::string name() const = 0;
  virtual int state_dim() const = 0;
  virtual int control_dim() const = 0;
  /// True when x = [q; qdot] and the first half of xdot equals qdot.
  virtual bool is_mechanical() const { return true; }
  int config_dim() const { return state_dim() / 2; }

  virtual VectorXd eval_f(const VectorXd& x, const VectorXd& u) const = 0;
  virtual FirstOrder jac_f(const VectorXd& x, const VectorXd& u) const = 0;

  virtual bool has_second_order() const { return false; }
  virtual SecondOrder hess_f(const VectorXd& x, const VectorXd& u,
                             HessianMode mode) const;

 protected:
  /// Throws ConfigError on wrong lengths and InputError on non-finite input.
  void check_inputs(const VectorXd& x, const VectorXd& u) const;
};

using ModelPtr = std::shared_ptr<const DynamicsModel>;

namespace detail {

template <typename S>
VectorX<S> seeded(const VectorXd& value, Eigen::Index direction) {
  VectorX<S> out(value.size());
  for (Eigen::Index i = 0; i < value.size(); ++i) {
    out(i) = S(value(i), i == direction ? 1.0 : 0.0);
  }
  return out;
}

template <typename S>
VectorX<S> lifted(const VectorXd& value) {
  VectorX<S> out(value.size());
  for (Eigen::Index i = 0; i < value.size(); ++i) out(i) = S(value(i));
  return out;
}

/// Two-level seeding: outer tangent along `outer`, inner along `inner`.
inline VectorX<Dual2> seeded2(const VectorXd& value, Eigen::Index outer,
                              Eigen::Index inner) {
  VectorX<Dual2> out(value.size());
  for (Eigen::Index i = 0; i < value.size(); ++i) {
    const Dual<double> v(value(i), i == inner ? 1.0 : 0.0);
    const Dual<double> d(i == outer ? 1.0 : 0.0, 0.0);
    out(i) = Dual2(v, d);
  }
  return out;
}

}  // namespace detail

/// Central finite-difference second derivatives built from jac_f.
SecondOrder finite_difference_hessian(const DynamicsModel& model,
                                      const VectorXd& x, const VectorXd& u,
                                      double step = 1e-5);

/// CRTP base giving exact first and second derivatives by forward-mode
/// dual numbers. Derived must provide
///   template <typename S>
///   VectorX<S> evaluate(const VectorX<S>& x, const VectorX<S>& u) const;
/// instantiable for double, Dual<double> and Dual2.
template <typename Derived>
class AutoDiffModel : public DynamicsModel {
 public:
  VectorXd eval_f(const VectorXd& x, const VectorXd& u) const override {
    check_inputs(x, u);
    return derived().template evaluate<double>(x, u);
  }

  FirstOrder jac_f(const VectorXd& x, const VectorXd& u) const override {
    check_inputs(x, u);
    using D = Dual<double>;
    const Eigen::Index nx = x.size();
    const Eigen::Index nu = u.size();
    FirstOrder out{VectorXd(nx), MatrixXd(nx, nx), MatrixXd(nx, nu)};
    for (Eigen::Index j = 0; j < nx + nu; ++j) {
      const VectorX<D> xd = j < nx ? detail::seeded<D>(x, j)
                                   : detail::lifted<D>(x);
      const VectorX<D> ud = j < nx ? detail::lifted<D>(u)
                                   : detail::seeded<D>(u, j - nx);
      const VectorX<D> fd = derived().template evaluate<D>(xd, ud);
      for (Eigen::Index i = 0; i < nx; ++i) {
        if (j == 0) out.f(i) = fd(i).v;
        if (j < nx) {
          out.fx(i, j) = fd(i).d;
        } else {
          out.fu(i, j - nx) = fd(i).d;
        }
      }
    }
    if (nx + nu == 0) out.f = eval_f(x, u);
    return out;
  }

  bool has_second_order() const override { return true; }

  SecondOrder hess_f(const VectorXd& x, const VectorXd& u,
                     HessianMode mode) const override {
    check_inputs(x, u);
    if (mode == HessianMode::finite_difference) {
      return finite_difference_hessian(*this, x, u);
    }
    const Eigen::Index nx = x.size();
    const Eigen::Index nu = u.size();
    const Eigen::Index nz = nx + nu;
    VectorXd z(nz);
    z << x, u;
    SecondOrder out;
    out.fxx.assign(nx, MatrixXd::Zero(nx, nx));
    out.fuu.assign(nx, MatrixXd::Zero(nu, nu));
    out.fxu.assign(nx, MatrixXd::Zero(nx, nu));
    for (Eigen::Index a = 0; a < nz; ++a) {
      for (Eigen::Index b = a; b < nz; ++b) {
        const VectorX<Dual2> zd = detail::seeded2(z, a, b);
        const VectorX<Dual2> fd =
            derived().template evaluate<Dual2>(zd.head(nx), zd.tail(nu));
        for (Eigen::Index i = 0; i < nx; ++i) {
          const double val = second_component(fd(i));
          if (b < nx) {
            out.fxx[i](a, b) = val;
            out.fxx[i](b, a) = val;
          } else if (a >= nx) {
            out.fuu[i](a - nx, b - nx) = val;
            out.fuu[i](b - nx, a - nx) = val;
          } else {
            out.fxu[i](a, b - nx) = val;
          }
        }
      }
    }
    return out;
  }

 private:
  const Derived& derived() const { return static_cast<const Derived&>(*this); }
};

/// xdot = A x + B u. Registered as a general (not necessarily mechanical)
/// model; used as an exact oracle for the solvers.
class LinearModel : public AutoDiffModel<LinearModel> {
 public:
  LinearModel(MatrixXd A, MatrixXd B, bool mechanical = false);

  std::string name() const override { return "linear"; }
  int state_dim() const override { return static_cast<int>(A_.rows()); }
  int control_dim() const override { return static_cast<int>(B_.cols()); }
  bool is_mechanical() const override { return mechanical_; }

  const MatrixXd& A() const { return A_; }
  const MatrixXd& B() const { return B_; }

  template <typename S>
  VectorX<S> evaluate(const VectorX<S>& x, const VectorX<S>& u) const {
    VectorX<S> out(A_.rows());
    for (Eigen::Index i = 0; i < A_.rows(); ++i) {
      S acc(0.0);
      for (Eigen::Index j = 0; j < A_.cols(); ++j) {
        if (A_(i, j) != 0.0) acc += A_(i, j) * x(j);
      }
      for (Eigen::Index j = 0; j < B_.cols(); ++j) {
        if (B_(i, j) != 0.0) acc += B_(i, j) * u(j);
      }
      out(i) = acc;
    }
    return out;
  }

 private:
  MatrixXd A_;
  MatrixXd B_;
  bool mechanical_;
};

/// Continuous-time double integrator chain: q'' = u per axis.
std::shared_ptr<LinearModel> make_double_integrator(int axes = 1);

struct DerivativeCheckOptions {
  int samples = 50;
  std::uint64_t seed = 1;
  /// Half-widths of the uniform sampling box around zero (broadcast when
  /// they have length 1).
  VectorXd x_range = VectorXd::Constant(1, 1.0);
  VectorXd u_range = VectorXd::Constant(1, 1.0);
  double fd_step = 1e-6;
  double hessian_fd_step = 1e-5;
  bool check_hessian = true;
};

struct DerivativeCheckReport {
  int samples = 0;
  double max_jacobian_error = 0.0;
  double max_hessian_error = 0.0;
  int worst_jacobian_sample = -1;
  int worst_hessian_sample = -1;
  /// Row/column of the worst Jacobian entry in [fx | fu].
  int worst_row = -1;
  int worst_col = -1;
  VectorXd worst_x;
  VectorXd worst_u;
  bool hessian_checked = false;
};

/// Compares jac_f (and hess_f when available) against central finite
/// differences at random samples. Errors are reported, never thrown.
DerivativeCheckReport check_derivatives(const DynamicsModel& model,
                                        const DerivativeCheckOptions& options);

/// Central finite-difference Jacobian of eval_f, used as an oracle.
FirstOrder finite_difference_jacobian(const DynamicsModel& model,
                                      const VectorXd& x, const VectorXd& u,
                                      double step = 1e-6);

}  // namespace softtraj

#endif  // SOFTTRAJ_MODEL_HPP
