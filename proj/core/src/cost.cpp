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

#include "gaitopt/cost.hpp"

#include <cmath>
#include <numbers>

#include "gaitopt/parallel.hpp"

namespace gaitopt {

PiecewiseReference::PiecewiseReference(Vector constant)
    : start_times_{0.0}, values_{std::move(constant)} {}

PiecewiseReference::PiecewiseReference(std::vector<double> start_times,
                                       std::vector<Vector> values)
    : start_times_(std::move(start_times)), values_(std::move(values)) {
  if (start_times_.empty() || start_times_.size() != values_.size())
    throw ConfigError("reference", "needs matching, non-empty times and values");
  for (std::size_t k = 1; k < start_times_.size(); ++k)
    if (!(start_times_[k] > start_times_[k - 1]))
      throw ConfigError("reference", "start times must increase");
  for (const auto& v : values_)
    if (v.size() != values_.front().size())
      throw ConfigError("reference", "all values need the same dimension");
}

const Vector& PiecewiseReference::at(double t) const {
  std::size_t k = 0;
  while (k + 1 < start_times_.size() && t >= start_times_[k + 1] - 1e-12) ++k;
  return values_[k];
}

double WaypointTerm::window(double t) const {
  const double offset = t - time;
  if (std::abs(offset) * std::sqrt(rho) > 6.0) return 0.0;
  return std::sqrt(rho / (2.0 * std::numbers::pi)) * std::exp(-0.5 * rho * offset * offset);
}

namespace {

void check_square(const Matrix& m, int dim, const std::string& field, bool definite) {
  if (m.rows() != dim || m.cols() != dim)
    throw ConfigError(field, "expected " + std::to_string(dim) + "x" +
                                 std::to_string(dim) + " matrix");
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + m.cwiseAbs().maxCoeff()))
    throw ConfigError(field, "must be symmetric");
  if (dim == 0) return;
  const double min_eig = Eigen::SelfAdjointEigenSolver<Matrix>(m).eigenvalues().minCoeff();
  const double tol = 1e-12 * (1.0 + m.cwiseAbs().maxCoeff());
  if (definite ? !(min_eig > 0.0) : min_eig < -tol)
    throw ConfigError(field, definite ? "must be positive definite"
                                      : "must be positive semidefinite");
}

Vector deviation(const Vector& x, const Vector& reference,
                 const std::vector<int>& angles) {
  Vector d = x - reference;
  for (int i : angles) d[i] = wrap_angle(d[i]);
  return d;
}

}  // namespace

void CostSpec::validate(int state_dim, int input_dim, double final_time) const {
  check_square(final_weight, state_dim, "cost.H", false);
  check_square(state_weight, state_dim, "cost.Q", false);
  check_square(input_weight, input_dim, "cost.R", true);
  if (state_reference.dim() != state_dim)
    throw ConfigError("cost.x_des", "expected dimension " + std::to_string(state_dim));
  if (input_reference.dim() != input_dim)
    throw ConfigError("cost.u_des", "expected dimension " + std::to_string(input_dim));
  for (std::size_t k = 0; k < waypoints.size(); ++k) {
    const auto& w = waypoints[k];
    const std::string field = "cost.waypoints[" + std::to_string(k) + "]";
    if (!(w.rho > 0.0)) throw ConfigError(field + ".rho", "must be > 0");
    if (w.time < 0.0 || w.time > final_time + 1e-12)
      throw ConfigError(field + ".t", "must lie within [0, t_f]");
    check_square(w.weight, state_dim, field + ".W", false);
    if (w.target.size() != state_dim)
      throw ConfigError(field + ".x", "expected dimension " + std::to_string(state_dim));
  }
}

CostSpec CostSpec::scaled(double c) const {
  CostSpec out = *this;
  out.final_weight *= c;
  out.state_weight *= c;
  out.input_weight *= c;
  for (auto& w : out.waypoints) w.weight *= c;
  return out;
}

double running_cost(const CostSpec& cost, const Vector& x, const Vector& u,
                    double t) {
  const Vector dx = deviation(x, cost.state_reference.at(t), cost.angle_indices);
  const Vector du = u - cost.input_reference.at(t);
  double l = dx.dot(cost.state_weight * dx) + du.dot(cost.input_weight * du);
  for (const auto& w : cost.waypoints) {
    const double window = w.window(t);
    if (window == 0.0) continue;
    const Vector dw = deviation(x, w.target, cost.angle_indices);
    l += window * dw.dot(w.weight * dw);
  }
  return l;
}

double final_cost(const CostSpec& cost, const Vector& x, double t_final) {
  const Vector dx = deviation(x, cost.state_reference.at(t_final), cost.angle_indices);
  return dx.dot(cost.final_weight * dx);
}

double evaluate(const CostSpec& cost, const StateInputTrajectory& trajectory) {
  const int horizon = trajectory.horizon();
  const double dt = trajectory.dt;
  double total = final_cost(cost, trajectory.states.back(), horizon * dt);
  for (int t = 0; t < horizon; ++t)
    total += running_cost(cost, trajectory.states[t], trajectory.inputs[t], t * dt) * dt;
  return total;
}

QuadraticCostSlice quadratize(const CostSpec& cost, const Vector& x,
                              const Vector& u, double t, double dt) {
  const Vector dx = deviation(x, cost.state_reference.at(t), cost.angle_indices);
  const Vector du = u - cost.input_reference.at(t);

  Matrix weight = cost.state_weight;
  Vector gradient = cost.state_weight * dx;
  double value = dx.dot(cost.state_weight * dx) + du.dot(cost.input_weight * du);
  for (const auto& w : cost.waypoints) {
    const double window = w.window(t);
    if (window == 0.0) continue;
    const Vector dw = deviation(x, w.target, cost.angle_indices);
    weight += window * w.weight;
    gradient += window * (w.weight * dw);
    value += window * dw.dot(w.weight * dw);
  }

  QuadraticCostSlice slice;
  slice.q = value * dt;
  slice.q_vec = 2.0 * dt * gradient;
  slice.q_mat = 2.0 * dt * weight;
  slice.r_vec = 2.0 * dt * (cost.input_weight * du);
  slice.r_mat = 2.0 * dt * cost.input_weight;
  return slice;
}

FinalCostSlice quadratize_final(const CostSpec& cost, const Vector& x,
                                double t_final) {
  const Vector dx = deviation(x, cost.state_reference.at(t_final), cost.angle_indices);
  FinalCostSlice slice;
  slice.p = dx.dot(cost.final_weight * dx);
  slice.p_vec = 2.0 * (cost.final_weight * dx);
  slice.p_mat = 2.0 * cost.final_weight;
  return slice;
}

std::vector<QuadraticCostSlice> quadratize(const CostSpec& cost,
                                           const StateInputTrajectory& trajectory,
                                           int threads) {
  std::vector<QuadraticCostSlice> slices(trajectory.horizon());
  parallel_for(trajectory.horizon(), threads, [&](int t) {
    slices[t] = quadratize(cost, trajectory.states[t], trajectory.inputs[t],
                           t * trajectory.dt, trajectory.dt);
  });
  return slices;
}

}  // namespace gaitopt
