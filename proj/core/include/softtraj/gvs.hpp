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

// Planar variable-strain dynamics for chains of rigid joints and soft rods.
//
// Each soft link is a Cosserat rod whose planar strain
//   xi(s) = [kappa_z, stretch, shear](s) = xi* + Phi(s) q_xi
// is expanded in shifted Legendre polynomials, one coefficient block per
// active mode. Rod poses follow g'(X) = g(X) xi^(X) and are integrated with a
// fourth-order Magnus step between Gauss-Legendre stations. The mass matrix,
// Coriolis and gravity terms come from the world-frame Jacobians of the
// lumped Gauss-point bodies, which are obtained by dual-number
// differentiation of the pose map.

#ifndef SOFTTRAJ_GVS_HPP
#define SOFTTRAJ_GVS_HPP

#include <array>
#include <cmath>
#include <memory>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "softtraj/model.hpp"

namespace softtraj {

using Eigen::Vector2d;
using Eigen::Vector3d;

enum class StrainMode { curvature = 0, stretch = 1, shear = 2 };
inline constexpr int kStrainModes = 3;

/// Legendre order per planar strain mode; -1 disables the mode (strain pinned
/// to its stress-free value).
struct StrainBasis {
  std::array<int, kStrainModes> order{-1, -1, -1};

  static StrainBasis rigid() { return {}; }
  static StrainBasis curvature_only(int order) { return {{order, -1, -1}}; }
  static StrainBasis full(int order = 2) { return {{order, order, order}}; }

  int mode_dof(StrainMode mode) const {
    return order[static_cast<int>(mode)] + 1;
  }
  /// Offset of the mode's coefficient block inside the link coordinates.
  int mode_offset(StrainMode mode) const;
  int dof() const;
  bool operator==(const StrainBasis&) const = default;
  void validate() const;
};

struct SoftLinkParams {
  double length = 1.0;           // m
  double radius = 0.03;          // m
  double density = 1000.0;       // kg/m^3
  double youngs_modulus = 1.0e6; // Pa
  double poisson = 0.5;
  double damping = 1.0e4;        // Pa s (Kelvin-Voigt)
  Vector3d xi_star{0.0, 1.0, 0.0};

  double area() const { return std::numbers::pi * radius * radius; }
  double second_moment() const {
    return 0.25 * std::numbers::pi * radius * radius * radius * radius;
  }
  double shear_modulus() const { return youngs_modulus / (2.0 * (1.0 + poisson)); }
  double mass() const { return density * area() * length; }
  void validate() const;
};

enum class JointKind { revolute, prismatic };

struct RigidJoint {
  JointKind kind = JointKind::revolute;
  double damping = 0.0;  // N m s/rad or N s/m
  bool actuated = false;
  std::string name = "joint";
  /// Translation direction of a prismatic joint in the frame it sits in.
  Vector2d axis{0.0, 1.0};
  /// Optional lumped body carried by the joint frame (e.g. a cart).
  double body_mass = 0.0;
  double body_inertia = 0.0;
};

struct SoftLink {
  SoftLinkParams params;
  StrainBasis basis = StrainBasis::full(2);
  int quadrature_order = 8;
};

using ChainElement = std::variant<RigidJoint, SoftLink>;

struct ChainLayout {
  std::vector<ChainElement> elements;
  Vector2d gravity{0.0, -9.81};
  /// Orientation of the base frame. -pi/2 makes rods hang along -y when all
  /// joint angles are zero.
  double base_angle = -0.5 * std::numbers::pi;

  int n() const;
  int m() const;
  int soft_link_count() const;
  void validate() const;
  /// Coordinate names, e.g. "d", "theta", "link0.kappa0".
  std::vector<std::string> coordinate_names() const;
  /// Indices of rigid-joint coordinates.
  std::vector<int> joint_coordinates() const;
};

/// Cart (prismatic, actuated) + passive revolute + one soft rod.
ChainLayout soft_cartpole_layout(StrainBasis basis = StrainBasis::full(2),
                                 SoftLinkParams rod = {},
                                 double cart_mass = 1.0,
                                 double joint_damping = 0.05);

/// Actuated revolute + rod(L/2) + passive revolute + rod(L/2).
ChainLayout soft_pendubot_layout(StrainBasis basis = StrainBasis::full(2),
                                 SoftLinkParams rod = {},
                                 double joint_damping = 0.05);

template <typename S>
struct Pose2 {
  S angle;
  S x;
  S y;
};

template <typename S>
struct Assembly {
  MatrixX<S> M;
  VectorX<S> h;
  MatrixXd B;
};

struct Energies {
  double kinetic = 0.0;
  double gravitational = 0.0;
  double elastic = 0.0;
  double total() const { return kinetic + gravitational + elastic; }
};

class GvsModel : public AutoDiffModel<GvsModel> {
 public:
  explicit GvsModel(ChainLayout layout, std::string name = "gvs");

  std::string name() const override { return name_; }
  int state_dim() const override { return 2 * n_; }
  int control_dim() const override { return m_; }
  const ChainLayout& layout() const { return layout_; }

  template <typename S>
  VectorX<S> evaluate(const VectorX<S>& x, const VectorX<S>& u) const;

  /// M(q), h(q, qdot) and B of M qdd + h = B u.
  template <typename S>
  Assembly<S> assemble(const VectorX<S>& q, const VectorX<S>& qdot) const;

  /// Planar strain (kappa_z, stretch, shear) of soft link `link` at arclength
  /// fraction s in [0, 1].
  Vector3d strain_field(int link, const VectorXd& q, double s) const;

  /// Poses at arclength fractions `stations[link]` for every soft link.
  std::vector<std::vector<Pose2<double>>> forward_kinematics(
      const VectorXd& q, const std::vector<std::vector<double>>& stations) const;

  Energies energies(const VectorXd& q, const VectorXd& qdot) const;

  /// Spatially averaged strain per soft link.
  std::vector<Vector3d> mean_strain(const VectorXd& q) const;

  /// Elastic stiffness and damping of a soft link in its own coordinates.
  const MatrixXd& link_stiffness(int link) const;
  const MatrixXd& link_damping(int link) const;
  /// Offset of a soft link's coordinate block in q.
  int link_offset(int link) const;

  /// Poses of all lumped bodies (Gauss-point rod slices and joint bodies).
  template <typename S>
  std::vector<Pose2<S>> body_poses(const VectorX<S>& q) const;

 private:
  struct Interval {
    double length = 0.0;
    std::vector<double> legendre_a;  // P_k at the first Gauss sample
    std::vector<double> legendre_b;  // P_k at the second Gauss sample
    bool ends_at_node = false;
  };
  struct LinkCache {
    int element = 0;
    int offset = 0;
    SoftLinkParams params;
    StrainBasis basis;
    std::vector<double> node_s;  // Gauss nodes as arclength fractions
    std::vector<double> node_w;  // physical weights (sum to L)
    std::vector<std::vector<double>> node_legendre;
    std::vector<Interval> intervals;
    MatrixXd K;
    MatrixXd D;
  };
  struct JointCache {
    int element = 0;
    int coordinate = 0;
    RigidJoint joint;
  };
  struct Body {
    double mass = 0.0;
    double inertia = 0.0;
  };

  template <typename S>
  void advance_link(const LinkCache& link, const VectorX<S>& q,
                    Pose2<S>& g, std::vector<Pose2<S>>* out) const;

  Vector3d strain_at(const LinkCache& link, const VectorXd& q, double s) const;

  ChainLayout layout_;
  std::string name_;
  int n_ = 0;
  int m_ = 0;
  std::vector<LinkCache> links_;
  std::vector<JointCache> joints_;
  std::vector<int> element_index_;  // element -> index in links_/joints_
  std::vector<Body> bodies_;        // same order as body_poses
  MatrixXd B_;
};

/// Free-function forms of the model operations.
Assembly<double> assemble_dynamics(const GvsModel& model, const VectorXd& q,
                                   const VectorXd& qdot);

}  // namespace softtraj

#endif  // SOFTTRAJ_GVS_HPP
