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

#include "softtraj/gvs.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "softtraj/linalg.hpp"
#include "softtraj/quadrature.hpp"

namespace softtraj {

namespace {

constexpr double kSqrt3 = 1.7320508075688772;

template <typename S>
struct Twist {
  S w;
  S vx;
  S vy;
};

// sin(t)/t and (1 - cos(t))/t, with series near zero so that every
// derivative level stays accurate.
template <typename S>
void exp_coefficients(const S& t, S& sinc, S& cosc) {
  if (std::abs(value_of(t)) < 1e-2) {
    const S t2 = t * t;
    sinc = 1.0 - t2 * (1.0 / 6.0 - t2 * (1.0 / 120.0 - t2 * (1.0 / 5040.0 -
                                                          t2 / 362880.0)));
    cosc = t * (0.5 - t2 * (1.0 / 24.0 - t2 * (1.0 / 720.0 - t2 * (1.0 / 40320.0 -
                                                                  t2 / 3628800.0))));
  } else {
    sinc = sin(t) / t;
    cosc = (1.0 - cos(t)) / t;
  }
}

// g <- g * exp(omega^) on SE(2).
template <typename S>
void compose_exp(Pose2<S>& g, const Twist<S>& omega) {
  S sinc, cosc;
  exp_coefficients(omega.w, sinc, cosc);
  const S tx = sinc * omega.vx - cosc * omega.vy;
  const S ty = cosc * omega.vx + sinc * omega.vy;
  const S c = cos(g.angle);
  const S s = sin(g.angle);
  g.x += c * tx - s * ty;
  g.y += s * tx + c * ty;
  g.angle += omega.w;
}

double legendre_or_zero(int k, double s) { return shifted_legendre(k, s); }

}  // namespace

int StrainBasis::mode_offset(StrainMode mode) const {
  int offset = 0;
  for (int i = 0; i < static_cast<int>(mode); ++i) offset += order[i] + 1;
  return offset;
}

int StrainBasis::dof() const {
  int total = 0;
  for (int o : order) total += o + 1;
  return total;
}

void StrainBasis::validate() const {
  for (int o : order) {
    if (o < -1 || o > 12) {
      throw ConfigError("strain basis order must lie in [-1, 12]");
    }
  }
}

void SoftLinkParams::validate() const {
  if (!(length > 0.0 && radius > 0.0 && density > 0.0 && youngs_modulus > 0.0)) {
    throw ConfigError("soft link: length, radius, density and E must be positive");
  }
  if (!(poisson > -1.0 && poisson <= 0.5)) {
    throw ConfigError("soft link: Poisson ratio must lie in (-1, 0.5]");
  }
  if (damping < 0.0) throw ConfigError("soft link: damping must be >= 0");
  if (!xi_star.allFinite()) throw ConfigError("soft link: xi* must be finite");
}

int ChainLayout::n() const {
  int n = 0;
  for (const auto& e : elements) {
    if (const auto* link = std::get_if<SoftLink>(&e)) {
      n += link->basis.dof();
    } else {
      n += 1;
    }
  }
  return n;
}

int ChainLayout::m() const {
  int m = 0;
  for (const auto& e : elements) {
    if (const auto* j = std::get_if<RigidJoint>(&e); j && j->actuated) ++m;
  }
  return m;
}

int ChainLayout::soft_link_count() const {
  return static_cast<int>(std::count_if(
      elements.begin(), elements.end(),
      [](const ChainElement& e) { return std::holds_alternative<SoftLink>(e); }));
}

void ChainLayout::validate() const {
  if (elements.empty()) throw ConfigError("chain layout has no elements");
  if (!gravity.allFinite()) throw ConfigError("gravity must be finite");
  for (const auto& e : elements) {
    if (const auto* link = std::get_if<SoftLink>(&e)) {
      link->params.validate();
      link->basis.validate();
      const int max_order =
          *std::max_element(link->basis.order.begin(), link->basis.order.end());
      if (link->quadrature_order < std::max(1, max_order + 1)) {
        throw ConfigError("soft link quadrature order too low for its basis");
      }
    } else {
      const auto& j = std::get<RigidJoint>(e);
      if (j.damping < 0.0 || j.body_mass < 0.0 || j.body_inertia < 0.0) {
        throw ConfigError("joint damping and body parameters must be >= 0");
      }
      if (j.kind == JointKind::prismatic && std::abs(j.axis.norm() - 1.0) > 1e-12) {
        throw ConfigError("prismatic joint axis must be a unit vector");
      }
    }
  }
  if (n() < 1) throw ConfigError("chain layout has no coordinates");
}

std::vector<std::string> ChainLayout::coordinate_names() const {
  static const char* kModes[] = {"kappa", "stretch", "shear"};
  std::vector<std::string> names;
  int link = 0;
  for (const auto& e : elements) {
    if (const auto* l = std::get_if<SoftLink>(&e)) {
      for (int mode = 0; mode < kStrainModes; ++mode) {
        for (int k = 0; k <= l->basis.order[mode]; ++k) {
          names.push_back("link" + std::to_string(link) + "." + kModes[mode] +
                          std::to_string(k));
        }
      }
      ++link;
    } else {
      names.push_back(std::get<RigidJoint>(e).name);
    }
  }
  return names;
}

std::vector<int> ChainLayout::joint_coordinates() const {
  std::vector<int> out;
  int coord = 0;
  for (const auto& e : elements) {
    if (const auto* l = std::get_if<SoftLink>(&e)) {
      coord += l->basis.dof();
    } else {
      out.push_back(coord++);
    }
  }
  return out;
}

ChainLayout soft_cartpole_layout(StrainBasis basis, SoftLinkParams rod,
                                 double cart_mass, double joint_damping) {
  ChainLayout layout;
  RigidJoint cart;
  cart.kind = JointKind::prismatic;
  cart.actuated = true;
  cart.name = "d";
  cart.body_mass = cart_mass;
  RigidJoint pivot;
  pivot.kind = JointKind::revolute;
  pivot.damping = joint_damping;
  pivot.name = "theta";
  layout.elements = {cart, pivot, SoftLink{rod, basis, 8}};
  layout.validate();
  return layout;
}

ChainLayout soft_pendubot_layout(StrainBasis basis, SoftLinkParams rod,
                                 double joint_damping) {
  rod.length *= 0.5;
  ChainLayout layout;
  RigidJoint shoulder;
  shoulder.actuated = true;
  shoulder.damping = joint_damping;
  shoulder.name = "theta1";
  RigidJoint elbow;
  elbow.damping = joint_damping;
  elbow.name = "theta2";
  layout.elements = {shoulder, SoftLink{rod, basis, 8}, elbow,
                     SoftLink{rod, basis, 8}};
  layout.validate();
  return layout;
}

GvsModel::GvsModel(ChainLayout layout, std::string name)
    : layout_(std::move(layout)), name_(std::move(name)) {
  layout_.validate();
  n_ = layout_.n();
  m_ = layout_.m();
  B_ = MatrixXd::Zero(n_, m_);
  int coord = 0;
  int actuator = 0;
  for (std::size_t e = 0; e < layout_.elements.size(); ++e) {
    const auto& element = layout_.elements[e];
    if (const auto* joint = std::get_if<RigidJoint>(&element)) {
      element_index_.push_back(static_cast<int>(joints_.size()));
      joints_.push_back(JointCache{static_cast<int>(e), coord, *joint});
      if (joint->actuated) B_(coord, actuator++) = 1.0;
      if (joint->body_mass > 0.0 || joint->body_inertia > 0.0) {
        bodies_.push_back(Body{joint->body_mass, joint->body_inertia});
      }
      ++coord;
      continue;
    }
    const auto& soft = std::get<SoftLink>(element);
    const SoftLinkParams& p = soft.params;
    LinkCache link;
    link.element = static_cast<int>(e);
    link.offset = coord;
    link.params = p;
    link.basis = soft.basis;
    const int max_order =
        std::max(0, *std::max_element(soft.basis.order.begin(), soft.basis.order.end()));
    const QuadratureRule rule = gauss_legendre(soft.quadrature_order);
    const int nq = soft.quadrature_order;
    auto legendre_table = [&](double s) {
      std::vector<double> v(max_order + 1);
      for (int k = 0; k <= max_order; ++k) v[k] = legendre_or_zero(k, s);
      return v;
    };
    for (int j = 0; j < nq; ++j) {
      link.node_s.push_back(0.5 * (rule.nodes[j] + 1.0));
      link.node_w.push_back(0.5 * rule.weights[j] * p.length);
      link.node_legendre.push_back(legendre_table(link.node_s.back()));
    }
    std::vector<double> breaks{0.0};
    breaks.insert(breaks.end(), link.node_s.begin(), link.node_s.end());
    breaks.push_back(1.0);
    for (std::size_t b = 0; b + 1 < breaks.size(); ++b) {
      const double a = breaks[b], c = breaks[b + 1];
      Interval iv;
      iv.length = (c - a) * p.length;
      iv.legendre_a = legendre_table(a + (c - a) * (0.5 - kSqrt3 / 6.0));
      iv.legendre_b = legendre_table(a + (c - a) * (0.5 + kSqrt3 / 6.0));
      iv.ends_at_node = b < static_cast<std::size_t>(nq);
      link.intervals.push_back(std::move(iv));
    }
    const int dof = soft.basis.dof();
    const double A = p.area();
    const double I = p.second_moment();
    const std::array<double, 3> stiffness{p.youngs_modulus * I,
                                          p.youngs_modulus * A,
                                          p.shear_modulus() * A};
    const std::array<double, 3> viscosity{
        p.damping * I, p.damping * A,
        p.damping * (p.shear_modulus() / p.youngs_modulus) * A};
    link.K = MatrixXd::Zero(dof, dof);
    link.D = MatrixXd::Zero(dof, dof);
    for (int mode = 0; mode < kStrainModes; ++mode) {
      const int order = soft.basis.order[mode];
      const int off = soft.basis.mode_offset(static_cast<StrainMode>(mode));
      for (int k = 0; k <= order; ++k) {
        for (int l = 0; l <= order; ++l) {
          double integral = 0.0;
          for (int j = 0; j < nq; ++j) {
            integral += link.node_w[j] * link.node_legendre[j][k] *
                        link.node_legendre[j][l];
          }
          link.K(off + k, off + l) = stiffness[mode] * integral;
          link.D(off + k, off + l) = viscosity[mode] * integral;
        }
      }
    }
    for (int j = 0; j < nq; ++j) {
      bodies_.push_back(
          Body{p.density * A * link.node_w[j], p.density * I * link.node_w[j]});
    }
    element_index_.push_back(static_cast<int>(links_.size()));
    links_.push_back(std::move(link));
    coord += dof;
  }
}

template <typename S>
void GvsModel::advance_link(const LinkCache& link, const VectorX<S>& q,
                            Pose2<S>& g, std::vector<Pose2<S>>* out) const {
  const Vector3d& xs = link.params.xi_star;
  auto strain = [&](const std::vector<double>& P, int mode) {
    S value(xs(mode));
    const int order = link.basis.order[mode];
    const int off = link.offset + link.basis.mode_offset(static_cast<StrainMode>(mode));
    for (int k = 0; k <= order; ++k) value += P[k] * q(off + k);
    return value;
  };
  for (const Interval& iv : link.intervals) {
    const Twist<S> a{strain(iv.legendre_a, 0), strain(iv.legendre_a, 1),
                     strain(iv.legendre_a, 2)};
    const Twist<S> b{strain(iv.legendre_b, 0), strain(iv.legendre_b, 1),
                     strain(iv.legendre_b, 2)};
    const double H = iv.length;
    const double c2 = kSqrt3 * H * H / 12.0;
    // Second Magnus term for g' = g xi^: c2 [xi_a, xi_b], whose se(2)
    // bracket has no rotational part.
    const S bx = -(a.w * b.vy) + b.w * a.vy;
    const S by = a.w * b.vx - b.w * a.vx;
    Twist<S> omega{0.5 * H * (a.w + b.w), 0.5 * H * (a.vx + b.vx) + c2 * bx,
                   0.5 * H * (a.vy + b.vy) + c2 * by};
    compose_exp(g, omega);
    if (iv.ends_at_node && out != nullptr) out->push_back(g);
  }
}

template <typename S>
std::vector<Pose2<S>> GvsModel::body_poses(const VectorX<S>& q) const {
  std::vector<Pose2<S>> out;
  out.reserve(bodies_.size());
  Pose2<S> g{S(layout_.base_angle), S(0.0), S(0.0)};
  for (std::size_t e = 0; e < layout_.elements.size(); ++e) {
    if (std::holds_alternative<RigidJoint>(layout_.elements[e])) {
      const JointCache& jc = joints_[element_index_[e]];
      const S& qi = q(jc.coordinate);
      if (jc.joint.kind == JointKind::revolute) {
        g.angle += qi;
      } else {
        const S c = cos(g.angle);
        const S s = sin(g.angle);
        const double ax = jc.joint.axis.x(), ay = jc.joint.axis.y();
        g.x += (c * ax - s * ay) * qi;
        g.y += (s * ax + c * ay) * qi;
      }
      if (jc.joint.body_mass > 0.0 || jc.joint.body_inertia > 0.0) out.push_back(g);
    } else {
      advance_link(links_[element_index_[e]], q, g, &out);
    }
  }
  return out;
}

template <typename S>
Assembly<S> GvsModel::assemble(const VectorX<S>& q, const VectorX<S>& qdot) const {
  using D1 = Dual<S>;
  using D2 = Dual<D1>;
  const std::size_t nb = bodies_.size();
  // Columns of the world-frame body Jacobians, rows (angle, x, y).
  std::vector<MatrixX<S>> J(nb, MatrixX<S>(3, n_));
  for (int i = 0; i < n_; ++i) {
    VectorX<D1> qd(n_);
    for (int k = 0; k < n_; ++k) qd(k) = D1(q(k), S(k == i ? 1.0 : 0.0));
    const std::vector<Pose2<D1>> poses = body_poses<D1>(qd);
    for (std::size_t b = 0; b < nb; ++b) {
      J[b](0, i) = poses[b].angle.d;
      J[b](1, i) = poses[b].x.d;
      J[b](2, i) = poses[b].y.d;
    }
  }
  // Velocity-product acceleration Jdot qdot = D^2 r[qdot, qdot].
  VectorX<D2> q2(n_);
  for (int k = 0; k < n_; ++k) q2(k) = D2(D1(q(k), qdot(k)), D1(qdot(k), S(0.0)));
  const std::vector<Pose2<D2>> accel = body_poses<D2>(q2);

  Assembly<S> out;
  out.M = MatrixX<S>::Zero(n_, n_);
  out.h = VectorX<S>::Zero(n_);
  out.B = B_;
  const double gx = layout_.gravity.x(), gy = layout_.gravity.y();
  for (std::size_t b = 0; b < nb; ++b) {
    const double mass = bodies_[b].mass;
    const double inertia = bodies_[b].inertia;
    const MatrixX<S>& Jb = J[b];
    const S aw = accel[b].angle.d.d;
    const S ax = accel[b].x.d.d;
    const S ay = accel[b].y.d.d;
    for (int i = 0; i < n_; ++i) {
      out.h(i) += inertia * Jb(0, i) * aw + mass * (Jb(1, i) * ax + Jb(2, i) * ay);
      out.h(i) -= mass * (Jb(1, i) * gx + Jb(2, i) * gy);
      for (int j = i; j < n_; ++j) {
        out.M(i, j) += inertia * Jb(0, i) * Jb(0, j) +
                       mass * (Jb(1, i) * Jb(1, j) + Jb(2, i) * Jb(2, j));
      }
    }
  }
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < i; ++j) out.M(i, j) = out.M(j, i);
  }
  for (const LinkCache& link : links_) {
    const int dof = link.basis.dof();
    for (int i = 0; i < dof; ++i) {
      for (int j = 0; j < dof; ++j) {
        if (link.K(i, j) != 0.0) out.h(link.offset + i) += link.K(i, j) * q(link.offset + j);
        if (link.D(i, j) != 0.0) {
          out.h(link.offset + i) += link.D(i, j) * qdot(link.offset + j);
        }
      }
    }
  }
  for (const JointCache& jc : joints_) {
    if (jc.joint.damping != 0.0) out.h(jc.coordinate) += jc.joint.damping * qdot(jc.coordinate);
  }
  return out;
}

template <typename S>
VectorX<S> GvsModel::evaluate(const VectorX<S>& x, const VectorX<S>& u) const {
  const VectorX<S> q = x.head(n_);
  const VectorX<S> qdot = x.tail(n_);
  const Assembly<S> a = assemble<S>(q, qdot);
  VectorX<S> rhs = -a.h;
  for (int i = 0; i < n_; ++i) {
    for (int k = 0; k < m_; ++k) {
      if (B_(i, k) != 0.0) rhs(i) += B_(i, k) * u(k);
    }
  }
  const VectorX<S> acc = spd_solve<S>(a.M, rhs);
  VectorX<S> out(2 * n_);
  out << qdot, acc;
  return out;
}

template VectorX<double> GvsModel::evaluate<double>(const VectorX<double>&,
                                                    const VectorX<double>&) const;
template VectorX<Dual<double>> GvsModel::evaluate<Dual<double>>(
    const VectorX<Dual<double>>&, const VectorX<Dual<double>>&) const;
template VectorX<Dual2> GvsModel::evaluate<Dual2>(const VectorX<Dual2>&,
                                                  const VectorX<Dual2>&) const;
template Assembly<double> GvsModel::assemble<double>(const VectorX<double>&,
                                                     const VectorX<double>&) const;
template Assembly<Dual<double>> GvsModel::assemble<Dual<double>>(
    const VectorX<Dual<double>>&, const VectorX<Dual<double>>&) const;
template std::vector<Pose2<double>> GvsModel::body_poses<double>(
    const VectorX<double>&) const;

Vector3d GvsModel::strain_at(const LinkCache& link, const VectorXd& q,
                             double s) const {
  Vector3d xi = link.params.xi_star;
  for (int mode = 0; mode < kStrainModes; ++mode) {
    const int off = link.offset + link.basis.mode_offset(static_cast<StrainMode>(mode));
    for (int k = 0; k <= link.basis.order[mode]; ++k) {
      xi(mode) += shifted_legendre(k, s) * q(off + k);
    }
  }
  return xi;
}

Vector3d GvsModel::strain_field(int link, const VectorXd& q, double s) const {
  if (link < 0 || link >= static_cast<int>(links_.size())) {
    throw ConfigError("strain_field: soft link index out of range");
  }
  if (q.size() != n_) throw ConfigError("strain_field: q has wrong length");
  if (!(s >= 0.0 && s <= 1.0)) {
    throw InputError("strain_field: arclength fraction must lie in [0, 1]");
  }
  return strain_at(links_[link], q, s);
}

std::vector<std::vector<Pose2<double>>> GvsModel::forward_kinematics(
    const VectorXd& q, const std::vector<std::vector<double>>& stations) const {
  if (q.size() != n_) throw ConfigError("forward_kinematics: q has wrong length");
  if (stations.size() != links_.size()) {
    throw ConfigError("forward_kinematics: need one station list per soft link");
  }
  std::vector<std::vector<Pose2<double>>> out(links_.size());
  Pose2<double> g{layout_.base_angle, 0.0, 0.0};
  for (std::size_t e = 0; e < layout_.elements.size(); ++e) {
    if (std::holds_alternative<RigidJoint>(layout_.elements[e])) {
      const JointCache& jc = joints_[element_index_[e]];
      if (jc.joint.kind == JointKind::revolute) {
        g.angle += q(jc.coordinate);
      } else {
        const double c = std::cos(g.angle), s = std::sin(g.angle);
        g.x += (c * jc.joint.axis.x() - s * jc.joint.axis.y()) * q(jc.coordinate);
        g.y += (s * jc.joint.axis.x() + c * jc.joint.axis.y()) * q(jc.coordinate);
      }
      continue;
    }
    const int li = element_index_[e];
    const LinkCache& link = links_[li];
    std::vector<double> requested = stations[li];
    for (double s : requested) {
      if (!(s >= 0.0 && s <= 1.0)) {
        throw InputError("forward_kinematics: stations must lie in [0, 1]");
      }
    }
    std::vector<double> breaks = link.node_s;
    breaks.insert(breaks.end(), requested.begin(), requested.end());
    breaks.push_back(0.0);
    breaks.push_back(1.0);
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    std::vector<Pose2<double>> at_break{g};
    for (std::size_t b = 0; b + 1 < breaks.size(); ++b) {
      const double a = breaks[b], c = breaks[b + 1];
      const double H = (c - a) * link.params.length;
      const Vector3d xa = strain_at(link, q, a + (c - a) * (0.5 - kSqrt3 / 6.0));
      const Vector3d xb = strain_at(link, q, a + (c - a) * (0.5 + kSqrt3 / 6.0));
      const double c2 = kSqrt3 * H * H / 12.0;
      Twist<double> omega{0.5 * H * (xa(0) + xb(0)),
                          0.5 * H * (xa(1) + xb(1)) + c2 * (-xa(0) * xb(2) + xb(0) * xa(2)),
                          0.5 * H * (xa(2) + xb(2)) + c2 * (xa(0) * xb(1) - xb(0) * xa(1))};
      compose_exp(g, omega);
      at_break.push_back(g);
    }
    for (double s : requested) {
      const auto it = std::lower_bound(breaks.begin(), breaks.end(), s);
      out[li].push_back(at_break[static_cast<std::size_t>(it - breaks.begin())]);
    }
  }
  return out;
}

Energies GvsModel::energies(const VectorXd& q, const VectorXd& qdot) const {
  if (q.size() != n_ || qdot.size() != n_) {
    throw ConfigError("energies: q/qdot have wrong length");
  }
  Energies e;
  const Assembly<double> a = assemble<double>(q, qdot);
  e.kinetic = 0.5 * qdot.dot(a.M * qdot);
  for (const LinkCache& link : links_) {
    const int dof = link.basis.dof();
    const VectorXd ql = q.segment(link.offset, dof);
    e.elastic += 0.5 * ql.dot(link.K * ql);
  }
  const std::vector<Pose2<double>> poses = body_poses<double>(q);
  for (std::size_t b = 0; b < bodies_.size(); ++b) {
    e.gravitational -= bodies_[b].mass *
                       (layout_.gravity.x() * poses[b].x + layout_.gravity.y() * poses[b].y);
  }
  return e;
}

std::vector<Vector3d> GvsModel::mean_strain(const VectorXd& q) const {
  if (q.size() != n_) throw ConfigError("mean_strain: q has wrong length");
  std::vector<Vector3d> out;
  for (const LinkCache& link : links_) {
    Vector3d mean = Vector3d::Zero();
    for (std::size_t j = 0; j < link.node_s.size(); ++j) {
      mean += link.node_w[j] * strain_at(link, q, link.node_s[j]);
    }
    out.push_back(mean / link.params.length);
  }
  return out;
}

const MatrixXd& GvsModel::link_stiffness(int link) const { return links_.at(link).K; }
const MatrixXd& GvsModel::link_damping(int link) const { return links_.at(link).D; }
int GvsModel::link_offset(int link) const { return links_.at(link).offset; }

Assembly<double> assemble_dynamics(const GvsModel& model, const VectorXd& q,
                                   const VectorXd& qdot) {
  if (q.size() != model.layout().n() || qdot.size() != model.layout().n()) {
    throw ConfigError("assemble_dynamics: q/qdot have wrong length");
  }
  return model.assemble<double>(q, qdot);
}

}  // namespace softtraj
