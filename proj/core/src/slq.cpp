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

#include "gaitopt/slq.hpp"

#include <chrono>
#include <cmath>
#include <limits>

namespace gaitopt {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

void SolverSettings::validate() const {
  if (max_iterations < 0) throw ConfigError("solver.max_iterations", "must be >= 0");
  if (!(alpha_d > 1.0)) throw ConfigError("solver.alpha_d", "must be > 1");
  if (max_line_search_steps < 1)
    throw ConfigError("solver.max_line_search_steps", "must be >= 1");
  if (!(convergence_threshold > 0.0))
    throw ConfigError("solver.convergence_threshold", "must be > 0");
  if (threads < 1) throw ConfigError("solver.threads", "must be >= 1");
  if (!(regularization_min > 0.0))
    throw ConfigError("solver.regularization_min", "must be > 0");
  if (!(regularization_max >= 0.0))
    throw ConfigError("solver.regularization_max", "must be >= 0");
  if (!(regularization_factor > 1.0))
    throw ConfigError("solver.regularization_factor", "must be > 1");
  integrator.validate();
}

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::MaxIterations: return "max_iterations";
    case SolveStatus::Stalled: return "stalled";
  }
  return "unknown";
}

BackwardPassResult backward_pass(const LinearizedDynamics& dynamics,
                                 const std::vector<QuadraticCostSlice>& running,
                                 const FinalCostSlice& final_slice, double mu) {
  const int horizon = static_cast<int>(running.size());
  if (static_cast<int>(dynamics.a.size()) != horizon ||
      static_cast<int>(dynamics.b.size()) != horizon)
    throw std::invalid_argument("dynamics and cost sequences differ in length");

  BackwardPassResult out;
  out.gain.resize(horizon);
  out.increment.resize(horizon);
  out.value.p_mat.resize(horizon + 1);
  out.value.p_vec.resize(horizon + 1);
  out.value.p.resize(horizon + 1);
  out.value.p_mat[horizon] = 0.5 * (final_slice.p_mat + final_slice.p_mat.transpose());
  out.value.p_vec[horizon] = final_slice.p_vec;
  out.value.p[horizon] = final_slice.p;

  for (int t = horizon - 1; t >= 0; --t) {
    const Matrix& a = dynamics.a[t];
    const Matrix& b = dynamics.b[t];
    const QuadraticCostSlice& slice = running[t];
    const Matrix& p_next = out.value.p_mat[t + 1];
    const Vector& pv_next = out.value.p_vec[t + 1];
    const int m = static_cast<int>(b.cols());

    const Matrix pb = p_next * b;
    Matrix h = slice.r_mat + b.transpose() * pb;
    h = 0.5 * (h + h.transpose());
    const Matrix g_mat = pb.transpose() * a;
    const Vector g_vec = slice.r_vec + b.transpose() * pv_next;

    Matrix h_shift = h;
    if (mu > 0.0) h_shift.diagonal().array() += mu;
    if (m > 0) {
      const double eps = 1e-6 * (1.0 + slice.r_mat.trace() / m);
      const double min_eig =
          Eigen::SelfAdjointEigenSolver<Matrix>(h_shift).eigenvalues().minCoeff();
      if (min_eig < eps) {
        h_shift.diagonal().array() += eps;
        ++out.regularized_steps;
      }
    }
    const Eigen::LLT<Matrix> llt(h_shift);
    if (m > 0 && llt.info() != Eigen::Success)
      throw DynamicsError("backward pass: H not positive definite at step " +
                              std::to_string(t),
                          t);

    Matrix& k = out.gain[t];
    Vector& l = out.increment[t];
    k = m > 0 ? Matrix(-llt.solve(g_mat)) : Matrix::Zero(0, a.cols());
    l = m > 0 ? Vector(-llt.solve(g_vec)) : Vector::Zero(0);

    const Matrix kt_h = k.transpose() * h;
    Matrix p = slice.q_mat + a.transpose() * p_next * a + kt_h * k +
               k.transpose() * g_mat + g_mat.transpose() * k;
    out.value.p_mat[t] = 0.5 * (p + p.transpose());
    out.value.p_vec[t] = slice.q_vec + a.transpose() * pv_next + kt_h * l +
                         k.transpose() * g_vec + g_mat.transpose() * l;
    out.value.p[t] = slice.q + out.value.p[t + 1] + 0.5 * l.dot(h * l) + l.dot(g_vec);

    if (!out.value.p_mat[t].allFinite() || !out.value.p_vec[t].allFinite())
      throw DynamicsError("backward pass: non-finite value function at step " +
                              std::to_string(t),
                          t);
  }
  return out;
}

double max_increment_norm(const std::vector<Vector>& increment) {
  double worst = 0.0;
  for (const auto& l : increment)
    if (l.size() > 0) worst = std::max(worst, l.cwiseAbs().maxCoeff());
  return worst;
}

LineSearchResult line_search(const System& system, const CostSpec& cost,
                             const StateInputTrajectory& nominal,
                             double nominal_cost,
                             const std::vector<Matrix>& gain,
                             const std::vector<Vector>& increment,
                             const SolverSettings& settings) {
  const int horizon = nominal.horizon();
  AffineController controller;
  controller.gain = gain;
  controller.reference.assign(nominal.states.begin(), nominal.states.end() - 1);
  controller.feedforward.resize(horizon);

  LineSearchResult result;
  double alpha = 1.0;
  for (int s = 0; s < settings.max_line_search_steps; ++s, alpha /= settings.alpha_d) {
    result.steps = s + 1;
    for (int t = 0; t < horizon; ++t)
      controller.feedforward[t] = nominal.inputs[t] + alpha * increment[t];
    StateInputTrajectory candidate;
    try {
      candidate = rollout(system, controller, nominal.states.front(), settings.integrator);
    } catch (const DynamicsError&) {
      continue;
    }
    const double candidate_cost = evaluate(cost, candidate);
    if (std::isfinite(candidate_cost) && candidate_cost < nominal_cost) {
      result.improved = true;
      result.alpha = alpha;
      result.cost = candidate_cost;
      result.trajectory = std::move(candidate);
      return result;
    }
  }
  result.cost = nominal_cost;
  return result;
}

SlqSolver::SlqSolver(const System& system, const CostSpec& cost,
                     SolverSettings settings)
    : system_(system), cost_(cost), settings_(std::move(settings)) {
  settings_.validate();
}

SlqSolution SlqSolver::solve(const Vector& x0,
                             const AffineController& initial_controller,
                             const IterationCallback& callback) const {
  SlqSolution sol;
  auto start = Clock::now();
  try {
    sol.nominal = rollout(system_, initial_controller, x0, settings_.integrator);
  } catch (const DynamicsError& e) {
    throw DynamicsError(std::string("initial rollout diverged: ") + e.what(),
                        e.time_index());
  }
  const double initial_rollout_time = seconds_since(start);
  double cost = evaluate(cost_, sol.nominal);
  sol.cost_trace.push_back(cost);
  const double t_final = sol.nominal.final_time();
  double mu = 0.0;

  for (int iteration = 1;; ++iteration) {
    IterationRecord record;
    record.iteration = iteration;
    if (iteration == 1) record.timings.rollout = initial_rollout_time;

    start = Clock::now();
    const LinearizedDynamics lin =
        linearize(system_, sol.nominal, settings_.integrator, settings_.threads);
    record.timings.linearize = seconds_since(start);

    start = Clock::now();
    const auto running = quadratize(cost_, sol.nominal, settings_.threads);
    const FinalCostSlice final_slice =
        quadratize_final(cost_, sol.nominal.states.back(), t_final);
    record.timings.quadratize = seconds_since(start);

    auto run_backward = [&](double mu) {
      start = Clock::now();
      BackwardPassResult bp;
      try {
        bp = backward_pass(lin, running, final_slice, mu);
      } catch (const DynamicsError& e) {
        throw DynamicsError(std::string(e.what()) + " (iteration " +
                                std::to_string(iteration) + ")",
                            e.time_index());
      }
      record.timings.backward += seconds_since(start);
      ++record.backward_passes;
      return bp;
    };

    // The convergence test always uses the unshifted pass.
    BackwardPassResult bp = run_backward(0.0);
    record.max_ff_increment = max_increment_norm(bp.increment);
    const bool converged = record.max_ff_increment < settings_.convergence_threshold;
    if (converged || sol.iterations >= settings_.max_iterations) {
      sol.status = converged ? SolveStatus::Converged : SolveStatus::MaxIterations;
      sol.gain = std::move(bp.gain);
      sol.increment = std::move(bp.increment);
      sol.value = std::move(bp.value);
      record.cost = cost;
      sol.diagnostics.push_back(record);
      if (callback) callback(record);
      break;
    }

    LineSearchResult ls;
    for (;;) {
      if (mu > 0.0) bp = run_backward(mu);
      start = Clock::now();
      ls = line_search(system_, cost_, sol.nominal, cost, bp.gain, bp.increment, settings_);
      record.timings.rollout += seconds_since(start);
      record.line_search_steps += ls.steps;
      if (ls.improved) break;
      mu = mu == 0.0 ? settings_.regularization_min : mu * settings_.regularization_factor;
      if (mu > settings_.regularization_max) break;
    }
    sol.gain = std::move(bp.gain);
    sol.increment = std::move(bp.increment);
    sol.value = std::move(bp.value);
    if (!ls.improved) {
      sol.status = SolveStatus::Stalled;
      record.cost = cost;
      sol.diagnostics.push_back(record);
      if (callback) callback(record);
      break;
    }
    record.accepted = true;
    record.alpha = ls.alpha;
    record.regularization = mu;
    record.cost = ls.cost;
    cost = ls.cost;
    sol.nominal = std::move(ls.trajectory);
    sol.cost_trace.push_back(cost);
    ++sol.iterations;
    sol.diagnostics.push_back(record);
    if (callback) callback(record);
    mu /= settings_.regularization_factor;
    if (mu < settings_.regularization_min) mu = 0.0;
  }

  sol.feedforward = sol.nominal.inputs;
  return sol;
}

}  // namespace gaitopt
