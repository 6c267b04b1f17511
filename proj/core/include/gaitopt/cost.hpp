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

#include <vector>

#include "gaitopt/common.hpp"
#include "gaitopt/system.hpp"

namespace gaitopt {

/// Piecewise-constant reference signal: value k applies from start_times[k]
/// until the next start time.
class PiecewiseReference {
 public:
  PiecewiseReference() = default;
  explicit PiecewiseReference(Vector constant);
  PiecewiseReference(std::vector<double> start_times, std::vector<Vector> values);

  const Vector& at(double t) const;
  int dim() const { return values_.empty() ? 0 : static_cast<int>(values_.front().size()); }

 private:
  std::vector<double> start_times_;
  std::vector<Vector> values_;
};

/// Quadratic state penalty localized in time by a normalized Gaussian
/// window sqrt(rho / 2 pi) exp(-rho / 2 (t - t_p)^2).
struct WaypointTerm {
  double time = 0.0;  // t_p, s
  double rho = 1.0;   // 1/s^2
  Matrix weight;      // W_p
  Vector target;      // x_wp

  /// Window value at t, truncated to zero beyond 6 / sqrt(rho).
  double window(double t) const;
};

/// J = xbar(tf)' H xbar(tf) + sum_t [xbar' Q xbar + ubar' R ubar + W(x,t)] dt
struct CostSpec {
  Matrix final_weight;   // H
  Matrix state_weight;   // Q
  Matrix input_weight;   // R
  PiecewiseReference state_reference;
  PiecewiseReference input_reference;
  std::vector<WaypointTerm> waypoints;
  std::vector<int> angle_indices;  // deviations wrapped to (-pi, pi]

  void validate(int state_dim, int input_dim, double final_time) const;

  /// Scales every weight matrix by c.
  CostSpec scaled(double c) const;
};

/// Second-order model of one running-cost step in the form
///   q + dx' q_vec + du' r_vec + 1/2 dx' Q dx + 1/2 du' R du
/// with the dt factor already applied.
struct QuadraticCostSlice {
  double q = 0.0;
  Vector q_vec;
  Matrix q_mat;
  Vector r_vec;
  Matrix r_mat;
};

struct FinalCostSlice {
  double p = 0.0;
  Vector p_vec;
  Matrix p_mat;
};

double evaluate(const CostSpec& cost, const StateInputTrajectory& trajectory);

double running_cost(const CostSpec& cost, const Vector& x, const Vector& u,
                    double t);
double final_cost(const CostSpec& cost, const Vector& x, double t_final);

QuadraticCostSlice quadratize(const CostSpec& cost, const Vector& x,
                              const Vector& u, double t, double dt);
FinalCostSlice quadratize_final(const CostSpec& cost, const Vector& x,
                                double t_final);

std::vector<QuadraticCostSlice> quadratize(const CostSpec& cost,
                                           const StateInputTrajectory& trajectory,
                                           int threads = 1);

}  // namespace gaitopt
