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


#include <gtest/gtest.h>

#include <random>

#include "gaitopt/linear_system.hpp"
#include "gaitopt/slq.hpp"
#include "gaitopt/task.hpp"
#include "lqr_oracle.hpp"
#include "test_util.hpp"

namespace gaitopt {
namespace {

CostSpec quadratic_cost(const Matrix& q, const Matrix& r, const Matrix& h) {
  CostSpec c;
  c.state_weight = q;
  c.input_weight = r;
  c.final_weight = h;
  c.state_reference = PiecewiseReference(Vector::Zero(q.rows()));
  c.input_reference = PiecewiseReference(Vector::Zero(r.rows()));
  return c;
}

TEST(Slq, OneIterationEqualsLqr) {
  std::mt19937_64 rng(42);
  const int n = 4, m = 2, horizon = 50;
  const double dt = 0.02;
  const Matrix a = testing::random_vector(rng, n * n).reshaped(n, n);
  const Matrix b = testing::random_vector(rng, n * m).reshaped(n, m);
  const Matrix q = Vector::LinSpaced(n, 1.0, 2.0).asDiagonal();
  const Matrix r = Matrix::Identity(m, m) * 0.3;
  const Matrix h = Matrix::Identity(n, n) * 5.0;
  const Vector x0 = testing::random_vector(rng, n);

  LinearSystem sys(a, b);
  const CostSpec cost = quadratic_cost(q, r, h);
  SolverSettings settings;
  settings.integrator = {IntegratorMethod::Rk4, dt};
  settings.convergence_threshold = 1e-9;
  const SlqSolution sol =
      SlqSolver(sys, cost, settings).solve(x0, AffineController::zero(horizon, m));

  Matrix phi, gamma;
  testing::rk4_discretize(a, b, dt, phi, gamma);
  const auto lqr = testing::solve_lqr(phi, gamma, q, r, h, dt, horizon, x0);
  EXPECT_TRUE(sol.converged());
  EXPECT_EQ(sol.iterations, 1);
  EXPECT_EQ(sol.diagnostics.front().alpha, 1.0);
  double worst = 0.0;
  for (int t = 0; t < horizon; ++t) {
    worst = std::max(worst, (sol.feedforward[t] - lqr.inputs[t]).cwiseAbs().maxCoeff());
    EXPECT_LT((sol.gain[t] + lqr.gain[t]).cwiseAbs().maxCoeff(), 1e-8);
  }
  EXPECT_LT(worst, 1e-8);
}

TEST(Slq, CostTraceMonotoneOnCartpole) {
  const auto config = load_task(testing::data_dir() / "tasks" / "cartpole-swingup-regularized.json");
  SolverSettings settings = config.solver;
  settings.max_iterations = 15;
  const SlqSolution sol = SlqSolver(*config.system, config.cost, settings)
                              .solve(config.initial_state, config.make_initial_controller());
  ASSERT_GE(sol.cost_trace.size(), 2u);
  for (std::size_t k = 1; k < sol.cost_trace.size(); ++k)
    EXPECT_LT(sol.cost_trace[k], sol.cost_trace[k - 1]);
  EXPECT_EQ(static_cast<int>(sol.cost_trace.size()), sol.iterations + 1);
  for (const auto& r : sol.diagnostics) {
    EXPECT_GE(r.timings.rollout, 0.0);
    if (r.accepted) EXPECT_GT(r.alpha, 0.0);
  }
}

// Reports B with the wrong sign, so the backward pass points uphill.
class LyingSystem final : public System {
 public:
  int state_dim() const override { return 1; }
  int input_dim() const override { return 1; }
  Vector derivative(const Vector& x, const Vector& u, const ContactState&) const override {
    return -x + u;
  }
  void jacobians(const Vector&, const Vector&, const ContactState&, Matrix& a,
                 Matrix& b) const override {
    a = -Matrix::Identity(1, 1);
    b = -Matrix::Identity(1, 1);
  }
};

TEST(Slq, FailedLineSearchIsReportedAsStall) {
  LyingSystem sys;
  const CostSpec cost = quadratic_cost(Matrix::Identity(1, 1), Matrix::Identity(1, 1) * 0.01,
                                       Matrix::Identity(1, 1));
  SolverSettings settings;
  settings.integrator = {IntegratorMethod::Rk4, 0.05};
  const SlqSolution sol = SlqSolver(sys, cost, settings)
                              .solve(Vector::Constant(1, 1.0), AffineController::zero(20, 1));
  EXPECT_EQ(sol.status, SolveStatus::Stalled);
  EXPECT_EQ(sol.iterations, 0);
  // Every regularization level gets a full line search before giving up.
  const IterationRecord& last = sol.diagnostics.back();
  EXPECT_GT(last.backward_passes, 1);
  EXPECT_EQ(last.line_search_steps, last.backward_passes * settings.max_line_search_steps);
  EXPECT_FALSE(last.accepted);

  settings.regularization_max = 0.0;
  const SlqSolution plain = SlqSolver(sys, cost, settings)
                                .solve(Vector::Constant(1, 1.0), AffineController::zero(20, 1));
  EXPECT_EQ(plain.status, SolveStatus::Stalled);
  EXPECT_EQ(plain.diagnostics.back().backward_passes, 1);
  EXPECT_EQ(plain.diagnostics.back().line_search_steps, settings.max_line_search_steps);
}

TEST(Slq, MaxIterationsStatus) {
  const auto config = load_task(testing::data_dir() / "tasks" / "cartpole-swingup-regularized.json");
  SolverSettings settings = config.solver;
  settings.max_iterations = 2;
  const SlqSolution sol = SlqSolver(*config.system, config.cost, settings)
                              .solve(config.initial_state, config.make_initial_controller());
  EXPECT_EQ(sol.status, SolveStatus::MaxIterations);
  EXPECT_EQ(sol.iterations, 2);
}

TEST(Slq, ThreadCountDoesNotChangeResult) {
  const auto config = load_task(testing::data_dir() / "tasks" / "cartpole-swingup-regularized.json");
  SolverSettings settings = config.solver;
  settings.max_iterations = 5;
  settings.threads = 1;
  const SlqSolution a = SlqSolver(*config.system, config.cost, settings)
                            .solve(config.initial_state, config.make_initial_controller());
  settings.threads = 3;
  const SlqSolution b = SlqSolver(*config.system, config.cost, settings)
                            .solve(config.initial_state, config.make_initial_controller());
  EXPECT_EQ(a.cost_trace, b.cost_trace);
  EXPECT_EQ(a.feedforward.back(), b.feedforward.back());
}

TEST(BackwardPass, RegularizesSingularH) {
  // B = 0 and R tiny: H is shifted instead of failing.
  LinearizedDynamics lin;
  lin.a.assign(3, Matrix::Identity(2, 2));
  lin.b.assign(3, Matrix::Zero(2, 1));
  QuadraticCostSlice s;
  s.q_vec = Vector::Zero(2);
  s.q_mat = Matrix::Identity(2, 2);
  s.r_vec = Vector::Zero(1);
  s.r_mat = Matrix::Zero(1, 1);
  FinalCostSlice f;
  f.p_vec = Vector::Ones(2);
  f.p_mat = Matrix::Identity(2, 2);
  const BackwardPassResult bp = backward_pass(lin, std::vector<QuadraticCostSlice>(3, s), f);
  EXPECT_EQ(bp.regularized_steps, 3);
  for (const auto& l : bp.increment) EXPECT_TRUE(l.allFinite());
}

TEST(SolverSettings, Validation) {
  SolverSettings s;
  EXPECT_NO_THROW(s.validate());
  s.alpha_d = 1.0;
  EXPECT_THROW(s.validate(), ConfigError);
  s = SolverSettings{};
  s.convergence_threshold = 0.0;
  EXPECT_THROW(s.validate(), ConfigError);
  s = SolverSettings{};
  s.max_line_search_steps = 0;
  EXPECT_THROW(s.validate(), ConfigError);
}

}  // namespace
}  // namespace gaitopt
