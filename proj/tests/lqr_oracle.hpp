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

#include <Eigen/Dense>

// Finite-horizon discrete LQR, written from the textbook recursion and
// kept free of library code so it can serve as an oracle.
namespace gaitopt::testing {

struct LqrOracle {
  std::vector<Eigen::MatrixXd> gain;  // u_t = -gain[t] x_t
  std::vector<Eigen::VectorXd> states;
  std::vector<Eigen::VectorXd> inputs;
};

// Exact transition of the classical RK4 scheme applied to xdot = A x + B u
// with u held over the step.
inline void rk4_discretize(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double dt,
                           Eigen::MatrixXd& phi, Eigen::MatrixXd& gamma) {
  const int n = static_cast<int>(a.rows());
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd h = a * dt;
  const Eigen::MatrixXd h2 = h * h;
  phi = eye + h + h2 / 2.0 + h2 * h / 6.0 + h2 * h2 / 24.0;
  gamma = (eye + h / 2.0 + h2 / 6.0 + h2 * h / 24.0) * b * dt;
}

// Minimizes x_N' H x_N + sum_t dt (x_t' Q x_t + u_t' R u_t).
inline LqrOracle solve_lqr(const Eigen::MatrixXd& phi, const Eigen::MatrixXd& gamma,
                           const Eigen::MatrixXd& q, const Eigen::MatrixXd& r,
                           const Eigen::MatrixXd& h, double dt, int horizon,
                           const Eigen::VectorXd& x0) {
  LqrOracle out;
  out.gain.resize(horizon);
  Eigen::MatrixXd p = h;
  for (int t = horizon - 1; t >= 0; --t) {
    const Eigen::MatrixXd s = r * dt + gamma.transpose() * p * gamma;
    out.gain[t] = s.ldlt().solve(gamma.transpose() * p * phi);
    const Eigen::MatrixXd closed = phi - gamma * out.gain[t];
    p = q * dt + out.gain[t].transpose() * r * dt * out.gain[t] + closed.transpose() * p * closed;
    p = 0.5 * (p + p.transpose()).eval();
  }
  Eigen::VectorXd x = x0;
  out.states.push_back(x);
  for (int t = 0; t < horizon; ++t) {
    const Eigen::VectorXd u = -out.gain[t] * x;
    x = phi * x + gamma * u;
    out.inputs.push_back(u);
    out.states.push_back(x);
  }
  return out;
}

}  // namespace gaitopt::testing
