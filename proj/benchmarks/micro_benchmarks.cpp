/*
 Copyright 2026 The gaitopt Authors

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

// Microbenchmarks of the per-step kernels. For whole-iteration scaling use
// `gaitopt benchmark`.

#include <string>

#include <benchmark/benchmark.h>

#include "gaitopt/model_io.hpp"
#include "gaitopt/rigid_body.hpp"
#include "gaitopt/task.hpp"

namespace {

using namespace gaitopt;

std::string task_file(const char* name) {
  return std::string(GAITOPT_DATA_DIR) + "/tasks/" + name + ".json";
}

const TaskConfig& reach() {
  static const TaskConfig config = load_task(task_file("quadruped-reach"));
  return config;
}

// Nominal rollout of the initial controller, shared by the kernels below.
const StateInputTrajectory& reach_rollout() {
  static const StateInputTrajectory traj =
      rollout(*reach().system, reach().make_initial_controller(), reach().initial_state,
              reach().solver.integrator);
  return traj;
}

void BM_ForwardDynamics(benchmark::State& state) {
  const char* names[] = {"planar_hopper", "planar_quadruped", "spatial_quadruped"};
  const RigidBodyModel model = load_rigid_body_model(std::string(GAITOPT_DATA_DIR) +
                                                     "/models/" + names[state.range(0)] + ".json");
  const int nv = model.num_dofs();
  const Vector q = Vector::Constant(nv, 0.1);
  const Vector nu = Vector::Constant(nv, 0.2);
  const Vector tau = Vector::Constant(model.num_actuated(), 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(forward_dynamics(model, q, nu, tau, {}));
  state.SetLabel(names[state.range(0)]);
}
BENCHMARK(BM_ForwardDynamics)->DenseRange(0, 2);

void BM_StepRk4(benchmark::State& state) {
  const auto& traj = reach_rollout();
  const int t = static_cast<int>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(step(*reach().system, traj.states[t], traj.inputs[t],
                                  traj.contacts[t], reach().solver.integrator));
}
BENCHMARK(BM_StepRk4)->Arg(0)->Arg(400);

void BM_DiscreteJacobians(benchmark::State& state) {
  const auto& traj = reach_rollout();
  Matrix a, b;
  for (auto _ : state) {
    discrete_jacobians(*reach().system, traj.states[0], traj.inputs[0], traj.contacts[0],
                       reach().solver.integrator, a, b);
    benchmark::DoNotOptimize(a.data());
  }
}
BENCHMARK(BM_DiscreteJacobians);

void BM_Quadratize(benchmark::State& state) {
  const auto& traj = reach_rollout();
  for (auto _ : state) benchmark::DoNotOptimize(quadratize(reach().cost, traj));
  state.SetItemsProcessed(state.iterations() * traj.horizon());
}
BENCHMARK(BM_Quadratize)->Unit(benchmark::kMillisecond);

void BM_BackwardPass(benchmark::State& state) {
  const auto& traj = reach_rollout();
  static const LinearizedDynamics dyn =
      linearize(*reach().system, traj, reach().solver.integrator);
  const auto running = quadratize(reach().cost, traj);
  const auto final_slice =
      quadratize_final(reach().cost, traj.states.back(), traj.final_time());
  for (auto _ : state) benchmark::DoNotOptimize(backward_pass(dyn, running, final_slice));
  state.SetItemsProcessed(state.iterations() * traj.horizon());
}
BENCHMARK(BM_BackwardPass)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
