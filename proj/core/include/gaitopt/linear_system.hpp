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

#include "gaitopt/system.hpp"

namespace gaitopt {

// xdot = A x + B u. With A = 0 and B = 0 this is the frozen test system.
class LinearSystem final : public System {
 public:
  LinearSystem(Matrix a, Matrix b);

  int state_dim() const override { return static_cast<int>(a_.rows()); }
  int input_dim() const override { return static_cast<int>(b_.cols()); }

  Vector derivative(const Vector& x, const Vector& u,
                    const ContactState& hidden) const override;
  void jacobians(const Vector& x, const Vector& u, const ContactState& hidden,
                 Matrix& a, Matrix& b) const override;

  std::string name() const override { return "linear"; }

  const Matrix& a() const { return a_; }
  const Matrix& b() const { return b_; }

 private:
  Matrix a_;
  Matrix b_;
};

}  // namespace gaitopt
