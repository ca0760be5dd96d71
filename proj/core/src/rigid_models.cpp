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

#include "softtraj/rigid_models.hpp"

namespace softtraj {

void RigidCartPoleParams::validate() const {
  if (!(cart_mass > 0.0 && pole_mass > 0.0 && pole_length > 0.0)) {
    throw ConfigError("rigid cart-pole: masses and length must be positive");
  }
  if (damping < 0.0) throw ConfigError("rigid cart-pole: damping must be >= 0");
}

RigidCartPole::RigidCartPole(RigidCartPoleParams params) : p_(params) {
  p_.validate();
}

double RigidCartPole::energy(const VectorXd& x) const {
  const double mc = p_.cart_mass, mp = p_.pole_mass;
  const double lc = 0.5 * p_.pole_length;
  const double th = x(1), dd = x(2), thd = x(3);
  const double kinetic =
      0.5 * (mc + mp) * dd * dd + mp * lc * std::cos(th) * dd * thd +
      0.5 * (p_.inertia_about_com() + mp * lc * lc) * thd * thd;
  const double potential = -mp * p_.gravity * lc * std::cos(th);
  return kinetic + potential;
}

void RigidPendubotParams::validate() const {
  if (!(mass1 > 0.0 && mass2 > 0.0 && length1 > 0.0 && length2 > 0.0)) {
    throw ConfigError("rigid pendubot: masses and lengths must be positive");
  }
  if (!(com_inertia1() > 0.0 && com_inertia2() > 0.0)) {
    throw ConfigError("rigid pendubot: inertias must be positive");
  }
  if (damping1 < 0.0 || damping2 < 0.0) {
    throw ConfigError("rigid pendubot: damping must be >= 0");
  }
}

RigidPendubot::RigidPendubot(RigidPendubotParams params) : p_(params) {
  p_.validate();
}

double RigidPendubot::energy(const VectorXd& x) const {
  const double m1 = p_.mass1, m2 = p_.mass2, l1 = p_.length1;
  const double lc1 = 0.5 * p_.length1, lc2 = 0.5 * p_.length2;
  const double t1 = x(0), t2 = x(1), w1 = x(2), w2 = x(3);
  const double M11 = p_.com_inertia1() + p_.com_inertia2() + m1 * lc1 * lc1 +
                     m2 * (l1 * l1 + lc2 * lc2 + 2.0 * l1 * lc2 * std::cos(t2));
  const double M12 = p_.com_inertia2() + m2 * (lc2 * lc2 + l1 * lc2 * std::cos(t2));
  const double M22 = p_.com_inertia2() + m2 * lc2 * lc2;
  const double kinetic = 0.5 * (M11 * w1 * w1 + 2.0 * M12 * w1 * w2 + M22 * w2 * w2);
  const double potential =
      -p_.gravity * (m1 * lc1 * std::cos(t1) +
                     m2 * (l1 * std::cos(t1) + lc2 * std::cos(t1 + t2)));
  return kinetic + potential;
}

}  // namespace softtraj
