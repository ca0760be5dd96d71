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

// Micro-benchmarks of the hot paths: model derivatives, the implicit step,
// one Box-IDDP backward pass, the Box-QP and the collocation Jacobian.
// The range argument selects the strain resolution of the soft cart-pole:
// 0 rigid (n = 2), 1 constant curvature (n = 3), 2 order-2 curvature
// (n = 5), 3 order 2 in every mode (n = 11).

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "softtraj/box_iddp.hpp"
#include "softtraj/boxqp.hpp"
#include "softtraj/collocation.hpp"
#include "softtraj/gvs.hpp"
#include "softtraj/integrator.hpp"
#include "softtraj/warmstart.hpp"

namespace {

using namespace softtraj;

StrainBasis basis(int level) {
  switch (level) {
    case 0: return StrainBasis::rigid();
    case 1: return StrainBasis::curvature_only(0);
    case 2: return StrainBasis::curvature_only(2);
    default: return StrainBasis::full(2);
  }
}

VectorXd sample_state(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-0.2, 0.2);
  VectorXd x(2 * n);
  for (int i = 0; i < 2 * n; ++i) x(i) = d(rng);
  x(1) += 1.0;
  return x;
}

void BM_JacF(benchmark::State& state) {
  const GvsModel model(soft_cartpole_layout(basis(static_cast<int>(state.range(0)))));
  const VectorXd x = sample_state(model.layout().n(), 1);
  const VectorXd u = VectorXd::Constant(1, 10.0);
  for (auto _ : state) benchmark::DoNotOptimize(model.jac_f(x, u));
  state.counters["n"] = model.layout().n();
}
BENCHMARK(BM_JacF)->DenseRange(0, 3)->Unit(benchmark::kMicrosecond);

void BM_HessF(benchmark::State& state) {
  const GvsModel model(soft_cartpole_layout(basis(static_cast<int>(state.range(0)))));
  const VectorXd x = sample_state(model.layout().n(), 2);
  const VectorXd u = VectorXd::Constant(1, 10.0);
  for (auto _ : state) benchmark::DoNotOptimize(model.hess_f(x, u, HessianMode::nested_dual));
  state.counters["n"] = model.layout().n();
}
BENCHMARK(BM_HessF)->DenseRange(0, 3)->Unit(benchmark::kMicrosecond);

void BM_ImplicitStep(benchmark::State& state) {
  const GvsModel model(soft_cartpole_layout(basis(static_cast<int>(state.range(0)))));
  const VectorXd x = sample_state(model.layout().n(), 3);
  const VectorXd u = VectorXd::Constant(1, 10.0);
  const ImplicitStepSettings s;
  for (auto _ : state) benchmark::DoNotOptimize(implicit_step(model, x, u, s));
  state.counters["n"] = model.layout().n();
}
BENCHMARK(BM_ImplicitStep)->DenseRange(0, 3)->Unit(benchmark::kMicrosecond);

void BM_BackwardPass(benchmark::State& state) {
  const GvsModel model(soft_cartpole_layout(basis(static_cast<int>(state.range(0)))));
  const OcpProblem prob = default_cartpole_swingup().build(model);
  const std::vector<VectorXd> us = pseudo_random_controls(prob.N, prob.bounds, 1);
  BoxIddpSettings settings;
  settings.step.h = prob.h;
  const std::vector<VectorXd> xs = rollout(model, prob.x0, us, settings.step);
  for (auto _ : state) {
    benchmark::DoNotOptimize(backward_pass(prob, model, xs, us, 1e-6, settings));
  }
  state.counters["n"] = model.layout().n();
}
BENCHMARK(BM_BackwardPass)->DenseRange(0, 3)->Unit(benchmark::kMillisecond);

void BM_BoxQp(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  std::mt19937_64 rng(4);
  std::normal_distribution<double> normal(0.0, 1.0);
  const MatrixXd A = MatrixXd::NullaryExpr(m, m, [&] { return normal(rng); });
  const MatrixXd H = A * A.transpose() + 0.1 * MatrixXd::Identity(m, m);
  const VectorXd g = VectorXd::NullaryExpr(m, [&] { return 5.0 * normal(rng); });
  const VectorXd lb = -VectorXd::Ones(m), ub = VectorXd::Ones(m);
  for (auto _ : state) benchmark::DoNotOptimize(solve_boxqp(H, g, lb, ub, VectorXd::Zero(m)));
}
BENCHMARK(BM_BoxQp)->DenseRange(1, 4)->Unit(benchmark::kMicrosecond);

void BM_DefectJacobian(benchmark::State& state) {
  const GvsModel model(soft_cartpole_layout(basis(static_cast<int>(state.range(0)))));
  SwingUpSpec spec = default_cartpole_swingup();
  spec.N = 100;
  const OcpProblem prob = spec.build(model);
  const Transcription tr(prob);
  const VectorXd z =
      z_from_interpolation(tr, pseudo_random_controls(prob.N, prob.bounds, 1));
  for (auto _ : state) benchmark::DoNotOptimize(defect_jacobian(tr, model, z));
  state.counters["n"] = model.layout().n();
}
BENCHMARK(BM_DefectJacobian)->DenseRange(0, 3)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
