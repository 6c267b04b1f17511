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

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gaitopt/common.hpp"
#include "gaitopt/cost.hpp"
#include "gaitopt/system.hpp"

namespace gaitopt {

struct SolverSettings {
  int max_iterations = 100;
  double alpha_d = 2.0;              // line-search divisor
  int max_line_search_steps = 10;
  double convergence_threshold = 1e-4;  // on max_t ||l(t)||_inf
  // Adaptive shift H + mu I after a failed line search. mu
  // starts at 0, jumps to regularization_min on the first failure, grows by
  // regularization_factor per failure and shrinks by it per accepted step.
  // regularization_max = 0 turns it off, so the first failure stalls.
  double regularization_min = 1e-6;
  double regularization_max = 1e8;
  double regularization_factor = 10.0;
  Integrator integrator;
  int threads = 1;

  void validate() const;
};

struct ValueFunction {
  std::vector<Matrix> p_mat;   // P(t), N + 1
  std::vector<Vector> p_vec;   // p(t)
  std::vector<double> p;       // scalar term
};

struct BackwardPassResult {
  std::vector<Matrix> gain;        // K(t)
  std::vector<Vector> increment;   // l(t)
  ValueFunction value;
  int regularized_steps = 0;
};

/// Riccati-like recursion of the SLQ iteration:
///   H = R + B' P+ B + mu I,  G = B' P+ A,  g = r + B' p+
///   K = -H^-1 G,      l = -H^-1 g
///   P = Q + A' P+ A + K' H K + K' G + G' K
///   p = q + A' p+ + K' H l + K' g + G' l
/// H is shifted by eps I when its smallest eigenvalue falls below
/// eps = 1e-6 (1 + trace(R) / m). The value update uses the unshifted H. Throws DynamicsError if H stays indefinite.
BackwardPassResult backward_pass(const LinearizedDynamics& dynamics,
                                 const std::vector<QuadraticCostSlice>& running,
                                 const FinalCostSlice& final_slice, double mu = 0.0);

struct PhaseTimings {
  double rollout = 0.0;  // s, includes line-search rollouts
  double linearize = 0.0;
  double quadratize = 0.0;
  double backward = 0.0;
  double total() const { return rollout + linearize + quadratize + backward; }
};

/// One record per outer iteration.
struct IterationRecord {
  int iteration = 0;
  double cost = 0.0;         // after the iteration
  double alpha = 0.0;        // accepted step, 0 if none
  double max_ff_increment = 0.0;  // of the unregularized backward pass
  double regularization = 0.0;    // mu of the accepted step
  int line_search_steps = 0;      // rollouts, summed over retries
  int backward_passes = 0;
  bool accepted = false;
  PhaseTimings timings;
};

enum class SolveStatus { Converged, MaxIterations, Stalled };
std::string to_string(SolveStatus status);

struct SlqSolution {
  StateInputTrajectory nominal;
  std::vector<Matrix> gain;        // K(t)
  std::vector<Vector> feedforward; // u_ff(t), the nominal inputs
  std::vector<Vector> increment;   // last l(t)
  ValueFunction value;
  std::vector<double> cost_trace;  // initial cost, then after each accepted update
  std::vector<IterationRecord> diagnostics;
  int iterations = 0;              // accepted updates
  SolveStatus status = SolveStatus::MaxIterations;

  bool converged() const { return status == SolveStatus::Converged; }
};

struct LineSearchResult {
  bool improved = false;
  double alpha = 0.0;
  double cost = 0.0;
  int steps = 0;
  StateInputTrajectory trajectory;
};

/// Tries alpha = 1, 1/alpha_d, ... and accepts the first rollout with lower
/// cost. Diverging rollouts count as rejections.
LineSearchResult line_search(const System& system, const CostSpec& cost,
                             const StateInputTrajectory& nominal,
                             double nominal_cost,
                             const std::vector<Matrix>& gain,
                             const std::vector<Vector>& increment,
                             const SolverSettings& settings);

double max_increment_norm(const std::vector<Vector>& increment);

class SlqSolver {
 public:
  using IterationCallback = std::function<void(const IterationRecord&)>;

  SlqSolver(const System& system, const CostSpec& cost, SolverSettings settings);

  /// Runs the SLQ iteration from the trajectory produced by
  /// `initial_controller`. Throws DynamicsError if that first rollout
  /// diverges or a backward pass fails.
  SlqSolution solve(const Vector& x0, const AffineController& initial_controller,
                    const IterationCallback& callback = {}) const;

 private:
  const System& system_;
  const CostSpec& cost_;
  SolverSettings settings_;
};

}  // namespace gaitopt
