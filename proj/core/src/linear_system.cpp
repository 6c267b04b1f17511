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

#include "gaitopt/linear_system.hpp"

namespace gaitopt {

LinearSystem::LinearSystem(Matrix a, Matrix b) : a_(std::move(a)), b_(std::move(b)) {
  if (a_.rows() != a_.cols() || b_.rows() != a_.rows())
    throw ConfigError("system", "A must be square and B must have as many rows as A");
}

Vector LinearSystem::derivative(const Vector& x, const Vector& u,
                                const ContactState&) const {
  return a_ * x + b_ * u;
}

void LinearSystem::jacobians(const Vector&, const Vector&, const ContactState&,
                             Matrix& a, Matrix& b) const {
  a = a_;
  b = b_;
}

}  // namespace gaitopt
