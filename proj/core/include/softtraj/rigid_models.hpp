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

// Closed-form rigid benchmark models. Angles are measured from the hanging
// (stable) equilibrium; theta = pi is upright.

#ifndef SOFTTRAJ_RIGID_MODELS_HPP
#define SOFTTRAJ_RIGID_MODELS_HPP

#include <cmath>

#include "softtraj/linalg.hpp"
#include "softtraj/model.hpp"

namespace softtraj {

struct RigidCartPoleParams {
  double cart_mass = 1.0;    // kg
  double pole_mass = 1.0;    // kg
  double pole_length = 1.0;  // m, pivot to tip; uniform rod
  /// Pole inertia about its centre of mass (kg m^2). Negative selects the
  /// uniform-rod value m l^2 / 12.
  double pole_inertia = -1.0;
  double damping = 0.0;  // joint damping, N m s / rad
  double gravity = 9.81;

  double inertia_about_com() const {
    return pole_inertia >= 0.0 ? pole_inertia
                               : pole_mass * pole_length * pole_length / 12.0;
  }
  void validate() const;
};

/// q = [d, theta]; u = [cart force].
class RigidCartPole : public AutoDiffModel<RigidCartPole> {
 public:
  explicit RigidCartPole(RigidCartPoleParams params);

  std::string name() const override { return "rigid-cartpole"; }
  int state_dim() const override { return 4; }
  int control_dim() const override { return 1; }
  const RigidCartPoleParams& params() const { return p_; }

  template <typename S>
  VectorX<S> evaluate(const VectorX<S>& x, const VectorX<S>& u) const {
    const double mc = p_.cart_mass;
    const double mp = p_.pole_mass;
    const double lc = 0.5 * p_.pole_length;
    const double ic = p_.inertia_about_com();
    const S s = sin(x(1));
    const S c = cos(x(1));
    const S thd = x(3);
    MatrixX<S> M(2, 2);
    M(0, 0) = S(mc + mp);
    M(0, 1) = mp * lc * c;
    M(1, 0) = M(0, 1);
    M(1, 1) = S(ic + mp * lc * lc);
    VectorX<S> rhs(2);
    rhs(0) = u(0) + mp * lc * s * thd * thd;
    rhs(1) = -(mp * p_.gravity * lc * s) - p_.damping * thd;
    const VectorX<S> acc = spd_solve<S>(M, rhs);
    VectorX<S> out(4);
    out << x(2), x(3), acc(0), acc(1);
    return out;
  }

  /// Kinetic plus potential energy, zero potential at the pivot height.
  double energy(const VectorXd& x) const;

 private:
  RigidCartPoleParams p_;
};

struct RigidPendubotParams {
  double mass1 = 1.0, mass2 = 1.0;        // kg
  double length1 = 0.5, length2 = 0.5;    // m, centre of mass at mid-length
  double inertia1 = -1.0, inertia2 = -1.0;  // about COM; negative = m l^2/12
  double damping1 = 0.0, damping2 = 0.0;  // N m s / rad
  double gravity = 9.81;

  double com_inertia1() const {
    return inertia1 >= 0.0 ? inertia1 : mass1 * length1 * length1 / 12.0;
  }
  double com_inertia2() const {
    return inertia2 >= 0.0 ? inertia2 : mass2 * length2 * length2 / 12.0;
  }
  void validate() const;
};

/// q = [theta1 (absolute), theta2 (relative)]; u = [torque at joint 1].
class RigidPendubot : public AutoDiffModel<RigidPendubot> {
 public:
  explicit RigidPendubot(RigidPendubotParams params);

  std::string name() const override { return "rigid-pendubot"; }
  int state_dim() const override { return 4; }
  int control_dim() const override { return 1; }
  const RigidPendubotParams& params() const { return p_; }

  template <typename S>
  VectorX<S> evaluate(const VectorX<S>& x, const VectorX<S>& u) const {
    const double m1 = p_.mass1, m2 = p_.mass2;
    const double l1 = p_.length1;
    const double lc1 = 0.5 * p_.length1, lc2 = 0.5 * p_.length2;
    const double i1 = p_.com_inertia1(), i2 = p_.com_inertia2();
    const double g = p_.gravity;
    const S c2 = cos(x(1));
    const S s2 = sin(x(1));
    const S s1 = sin(x(0));
    const S s12 = sin(x(0) + x(1));
    const S w1 = x(2), w2 = x(3);
    MatrixX<S> M(2, 2);
    M(0, 0) = i1 + i2 + m1 * lc1 * lc1 +
              m2 * (l1 * l1 + lc2 * lc2 + 2.0 * l1 * lc2 * c2);
    M(0, 1) = i2 + m2 * (lc2 * lc2 + l1 * lc2 * c2);
    M(1, 0) = M(0, 1);
    M(1, 1) = S(i2 + m2 * lc2 * lc2);
    const S k = m2 * l1 * lc2 * s2;
    VectorX<S> h(2);
    h(0) = -(k * (2.0 * w1 * w2 + w2 * w2)) + (m1 * lc1 + m2 * l1) * g * s1 +
           m2 * lc2 * g * s12 + p_.damping1 * w1;
    h(1) = k * w1 * w1 + m2 * lc2 * g * s12 + p_.damping2 * w2;
    VectorX<S> rhs(2);
    rhs(0) = u(0) - h(0);
    rhs(1) = -h(1);
    const VectorX<S> acc = spd_solve<S>(M, rhs);
    VectorX<S> out(4);
    out << x(2), x(3), acc(0), acc(1);
    return out;
  }

  double energy(const VectorXd& x) const;

 private:
  RigidPendubotParams p_;
};

}  // namespace softtraj

#endif  // SOFTTRAJ_RIGID_MODELS_HPP
