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

#include "gaitopt/system.hpp"

#include "gaitopt/parallel.hpp"

namespace gaitopt {

void System::jacobians(const Vector& x, const Vector& u,
                       const ContactState& hidden, Matrix& a,
                       Matrix& b) const {
  const int n = state_dim();
  const int m = input_dim();
  a.resize(n, n);
  b.resize(n, m);
  Vector xp = x, xm = x;
  for (int i = 0; i < n; ++i) {
    const double h = fd_step(x[i]);
    xp[i] = x[i] + h;
    xm[i] = x[i] - h;
    a.col(i) = (derivative(xp, u, hidden) - derivative(xm, u, hidden)) / (2.0 * h);
    xp[i] = xm[i] = x[i];
  }
  Vector up = u, um = u;
  for (int i = 0; i < m; ++i) {
    const double h = fd_step(u[i]);
    up[i] = u[i] + h;
    um[i] = u[i] - h;
    b.col(i) = (derivative(x, up, hidden) - derivative(x, um, hidden)) / (2.0 * h);
    up[i] = um[i] = u[i];
  }
}

ContactState System::initial_contact_state(const Vector& x) const {
  return update_contact_state(ContactState(num_feet()), x);
}

ContactState System::update_contact_state(const ContactState& hidden,
                                          const Vector&) const {
  return hidden;
}

void Integrator::validate() const {
  if (!(dt > 0.0)) throw ConfigError("dt", "must be > 0");
}

IntegratorMethod parse_integrator(const std::string& name) {
  if (name == "rk4") return IntegratorMethod::Rk4;
  if (name == "explicit-euler" || name == "euler")
    return IntegratorMethod::ExplicitEuler;
  throw ConfigError("integrator", "unknown method '" + name + "'");
}

std::string to_string(IntegratorMethod method) {
  return method == IntegratorMethod::Rk4 ? "rk4" : "explicit-euler";
}

namespace {

Vector checked_derivative(const System& system, const Vector& x,
                          const Vector& u, const ContactState& hidden) {
  Vector dx = system.derivative(x, u, hidden);
  if (!dx.allFinite()) throw DynamicsError("non-finite state derivative");
  return dx;
}

}  // namespace

StepResult step(const System& system, const Vector& x, const Vector& u,
                const ContactState& hidden, const Integrator& integrator) {
  const double dt = integrator.dt;
  Vector next;
  if (integrator.method == IntegratorMethod::ExplicitEuler) {
    next = x + dt * checked_derivative(system, x, u, hidden);
  } else {
    const Vector k1 = checked_derivative(system, x, u, hidden);
    const Vector k2 = checked_derivative(system, x + 0.5 * dt * k1, u, hidden);
    const Vector k3 = checked_derivative(system, x + 0.5 * dt * k2, u, hidden);
    const Vector k4 = checked_derivative(system, x + dt * k3, u, hidden);
    next = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  ContactState contact = system.update_contact_state(hidden, next);
  return {std::move(next), std::move(contact)};
}

Vector AffineController::input(int t, const Vector& x) const {
  if (gain.empty()) return feedforward[t];
  return feedforward[t] + gain[t] * (x - reference[t]);
}

AffineController AffineController::open_loop(std::vector<Vector> inputs) {
  AffineController c;
  c.feedforward = std::move(inputs);
  return c;
}

AffineController AffineController::zero(int horizon, int input_dim) {
  return open_loop(std::vector<Vector>(horizon, Vector::Zero(input_dim)));
}

StateInputTrajectory rollout(const System& system,
                             const AffineController& controller,
                             const Vector& x0, const Integrator& integrator) {
  const int horizon = controller.horizon();
  if (!controller.gain.empty() &&
      (static_cast<int>(controller.gain.size()) != horizon ||
       static_cast<int>(controller.reference.size()) != horizon))
    throw std::invalid_argument("controller must be defined on every step");

  StateInputTrajectory traj;
  traj.dt = integrator.dt;
  traj.states.reserve(horizon + 1);
  traj.inputs.reserve(horizon);
  traj.contacts.reserve(horizon + 1);
  traj.states.push_back(x0);
  traj.contacts.push_back(system.initial_contact_state(x0));

  for (int t = 0; t < horizon; ++t) {
    try {
      Vector u = controller.input(t, traj.states[t]);
      if (!u.allFinite()) throw DynamicsError("non-finite control input");
      StepResult next = step(system, traj.states[t], u, traj.contacts[t], integrator);
      traj.inputs.push_back(std::move(u));
      traj.states.push_back(std::move(next.state));
      traj.contacts.push_back(std::move(next.contact));
    } catch (const DynamicsError& e) {
      throw DynamicsError(std::string(e.what()) + " at step " + std::to_string(t), t);
    }
  }
  return traj;
}

void discrete_jacobians(const System& system, const Vector& x, const Vector& u,
                        const ContactState& hidden, const Integrator& integrator,
                        Matrix& a, Matrix& b) {
  const int n = system.state_dim();
  const double dt = integrator.dt;
  Matrix a1, b1;
  system.jacobians(x, u, hidden, a1, b1);
  if (integrator.method == IntegratorMethod::ExplicitEuler) {
    a = Matrix::Identity(n, n) + dt * a1;
    b = dt * b1;
    return;
  }

  // Variational equations of the RK4 map: stage derivatives are chained
  // through the stage points exactly as in step().
  const Matrix eye = Matrix::Identity(n, n);
  const Vector k1 = system.derivative(x, u, hidden);
  const Vector x2 = x + 0.5 * dt * k1;
  const Vector k2 = system.derivative(x2, u, hidden);
  const Vector x3 = x + 0.5 * dt * k2;
  const Vector k3 = system.derivative(x3, u, hidden);
  const Vector x4 = x + dt * k3;

  Matrix a2, b2, a3, b3, a4, b4;
  system.jacobians(x2, u, hidden, a2, b2);
  system.jacobians(x3, u, hidden, a3, b3);
  system.jacobians(x4, u, hidden, a4, b4);

  const Matrix k1x = a1;
  const Matrix k1u = b1;
  const Matrix k2x = a2 + 0.5 * dt * (a2 * k1x);
  const Matrix k2u = b2 + 0.5 * dt * (a2 * k1u);
  const Matrix k3x = a3 + 0.5 * dt * (a3 * k2x);
  const Matrix k3u = b3 + 0.5 * dt * (a3 * k2u);
  const Matrix k4x = a4 + dt * (a4 * k3x);
  const Matrix k4u = b4 + dt * (a4 * k3u);

  a = eye + (dt / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
  b = (dt / 6.0) * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
}

LinearizedDynamics linearize(const System& system,
                             const StateInputTrajectory& trajectory,
                             const Integrator& integrator, int threads) {
  const int horizon = trajectory.horizon();
  LinearizedDynamics lin;
  lin.a.resize(horizon);
  lin.b.resize(horizon);
  parallel_for(horizon, threads, [&](int t) {
    discrete_jacobians(system, trajectory.states[t], trajectory.inputs[t],
                       trajectory.contacts[t], integrator, lin.a[t], lin.b[t]);
    if (!lin.a[t].allFinite() || !lin.b[t].allFinite()) {
      Eigen::Index row = 0, col = 0;
      const bool in_a = !lin.a[t].allFinite();
      const Matrix& m = in_a ? lin.a[t] : lin.b[t];
      for (Eigen::Index c = 0; c < m.cols(); ++c)
        for (Eigen::Index r = 0; r < m.rows(); ++r)
          if (!std::isfinite(m(r, c))) { row = r; col = c; }
      throw DynamicsError("non-finite Jacobian entry " +
                              std::string(in_a ? "A(" : "B(") + std::to_string(row) +
                              "," + std::to_string(col) + ") at step " +
                              std::to_string(t),
                          t);
    }
  });
  return lin;
}

}  // namespace gaitopt
