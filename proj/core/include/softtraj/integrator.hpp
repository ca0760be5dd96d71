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

// Time discretization: implicit-Euler residual, its Newton solve and the
// derivatives of the implicit step map, plus an explicit RK4 reference.
//
// The implicit step is defined by g(x', x, u) = x' - x - h f(x', u) = 0.
// Derivatives of the step map follow from the implicit function theorem:
// fx = -g_x'^{-1} g_x and fu = -g_x'^{-1} g_u.

#ifndef SOFTTRAJ_INTEGRATOR_HPP
#define SOFTTRAJ_INTEGRATOR_HPP

#include <optional>
#include <vector>

#include <Eigen/Core>
#include <Eigen/LU>

#include "softtraj/model.hpp"

namespace softtraj {

struct ImplicitStepSettings {
  double h = 0.01;
  double newton_tol = 1e-10;  // infinity norm of the residual
  int max_newton_iters = 50;
  bool line_search = true;
  double backtrack = 0.5;
  double min_alpha = 9.5367431640625e-07;  // 2^-20

  void validate() const;
};

struct StepResult {
  VectorXd xp;
  int newton_iters = 0;
  double residual_norm = 0.0;
};

/// Blocks of the residual derivatives. Second-order blocks are stored per
/// residual component a: g_xpxp[a] (nx x nx), g_uu[a] (nu x nu),
/// g_xpu[a] (nx x nu). g_x'x and g_xx vanish for implicit Euler.
struct ResidualDerivatives {
  MatrixXd g_xp;
  MatrixXd g_x;
  MatrixXd g_u;
  std::vector<MatrixXd> g_xpxp;
  std::vector<MatrixXd> g_uu;
  std::vector<MatrixXd> g_xpu;
  int order = 1;
};

struct DiscreteJacobians {
  MatrixXd fx;
  MatrixXd fu;
};

/// Second derivatives of the step map, one matrix per output component.
struct DiscreteHessians {
  std::vector<MatrixXd> Fxx;
  std::vector<MatrixXd> Fuu;
  std::vector<MatrixXd> Fxu;
};

enum class Scheme { implicit_euler, rk4 };

VectorXd residual(const DynamicsModel& model, const VectorXd& x,
                  const VectorXd& xp, const VectorXd& u, double h);

/// Damped Newton solve of the implicit-Euler residual. Throws
/// IntegrationError when the residual does not reach newton_tol.
StepResult implicit_step(const DynamicsModel& model, const VectorXd& x,
                         const VectorXd& u, const ImplicitStepSettings& settings,
                         const std::optional<VectorXd>& guess = std::nullopt);

/// Same solution as implicit_step, but iterates with a fixed, already
/// factorized Newton matrix (chord method) and switches to exact Newton when
/// the chord iteration stalls. Used where a nearby g_x' is at hand.
StepResult implicit_step_chord(const DynamicsModel& model, const VectorXd& x,
                               const VectorXd& u, const ImplicitStepSettings& settings,
                               const VectorXd& guess,
                               const Eigen::PartialPivLU<MatrixXd>& newton_matrix,
                               int max_chord_iters = 12);

ResidualDerivatives residual_derivatives(
    const DynamicsModel& model, const VectorXd& x, const VectorXd& xp,
    const VectorXd& u, double h, int order = 1,
    HessianMode mode = HessianMode::nested_dual);

DiscreteJacobians discrete_jacobians(const ResidualDerivatives& rd);

DiscreteHessians discrete_hessians(const ResidualDerivatives& rd,
                                   const DiscreteJacobians& jac);

/// One classical Runge-Kutta step (reference scheme only).
VectorXd rk4_step(const DynamicsModel& model, const VectorXd& x,
                  const VectorXd& u, double h);

/// N+1 states from x0 under controls us. Implicit steps are warm-started
/// from the previous state. A failing step raises IntegrationError whose
/// step() is the failing index; RK4 fails when a state turns non-finite.
std::vector<VectorXd> rollout(const DynamicsModel& model, const VectorXd& x0,
                              const std::vector<VectorXd>& us,
                              const ImplicitStepSettings& settings,
                              Scheme scheme = Scheme::implicit_euler);

}  // namespace softtraj

#endif  // SOFTTRAJ_INTEGRATOR_HPP
