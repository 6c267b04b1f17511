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

#include <string>
#include <vector>

#include "gaitopt/common.hpp"
#include "gaitopt/contact.hpp"

namespace gaitopt {

/// Continuous-time controlled system xdot = f(x, u) with optional hidden
/// contact state that is threaded through rollouts but never optimized.
///
/// Implementations are immutable after construction and safe to share
/// between threads.
class System {
 public:
  virtual ~System() = default;

  virtual int state_dim() const = 0;
  virtual int input_dim() const = 0;
  virtual int num_feet() const { return 0; }

  virtual Vector derivative(const Vector& x, const Vector& u,
                            const ContactState& hidden) const = 0;

  /// Continuous Jacobians df/dx (n x n) and df/du (n x m) with the hidden
  /// state frozen. The default uses central differences.
  virtual void jacobians(const Vector& x, const Vector& u,
                         const ContactState& hidden, Matrix& a,
                         Matrix& b) const;

  virtual ContactState initial_contact_state(const Vector& x) const;
  /// Hidden state after the system reached `x`.
  virtual ContactState update_contact_state(const ContactState& hidden,
                                            const Vector& x) const;

  /// State coordinates holding angles; cost deviations on these are wrapped.
  virtual std::vector<int> angle_indices() const { return {}; }

  virtual std::string name() const { return "system"; }
};

enum class IntegratorMethod { ExplicitEuler, Rk4 };

struct Integrator {
  IntegratorMethod method = IntegratorMethod::Rk4;
  double dt = 4e-3;

  void validate() const;
};

IntegratorMethod parse_integrator(const std::string& name);
std::string to_string(IntegratorMethod method);

struct StepResult {
  Vector state;
  ContactState contact;
};

/// Integrates one step with anchors frozen, then updates the hidden state
/// from the new foot positions. Throws DynamicsError on a non-finite
/// derivative.
StepResult step(const System& system, const Vector& x, const Vector& u,
                const ContactState& hidden, const Integrator& integrator);

/// u(x, t) = feedforward(t) + gain(t) (x - reference(t)). An empty gain
/// sequence means open loop.
struct AffineController {
  std::vector<Vector> feedforward;
  std::vector<Matrix> gain;
  std::vector<Vector> reference;

  int horizon() const { return static_cast<int>(feedforward.size()); }
  Vector input(int t, const Vector& x) const;

  static AffineController open_loop(std::vector<Vector> inputs);
  static AffineController zero(int horizon, int input_dim);
};

struct StateInputTrajectory {
  double dt = 0.0;
  std::vector<Vector> states;         // N + 1
  std::vector<Vector> inputs;         // N
  std::vector<ContactState> contacts; // N + 1, contacts[t] is used by step t

  int horizon() const { return static_cast<int>(inputs.size()); }
  double final_time() const { return dt * horizon(); }
};

/// Forward simulation under `controller` for its full horizon. Errors carry
/// the failing time index.
StateInputTrajectory rollout(const System& system,
                             const AffineController& controller,
                             const Vector& x0, const Integrator& integrator);

/// Discrete-time Jacobians of the integration step, length N.
struct LinearizedDynamics {
  std::vector<Matrix> a;
  std::vector<Matrix> b;
};

/// Jacobians of one integration step, consistent with `step`:
/// I + A dt for Euler and the exact variational map for RK4.
void discrete_jacobians(const System& system, const Vector& x, const Vector& u,
                        const ContactState& hidden, const Integrator& integrator,
                        Matrix& a, Matrix& b);

LinearizedDynamics linearize(const System& system,
                             const StateInputTrajectory& trajectory,
                             const Integrator& integrator, int threads = 1);

/// Central finite-difference step used throughout the library.
inline double fd_step(double value) {
  return std::max(1e-6, 1e-6 * std::abs(value));
}

}  // namespace gaitopt
