/* Copyright 2026 The Neural Pathways Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include "np/activation.hpp"

#include <cmath>
#include <string>

#include "np/common.hpp"

namespace np {

std::string_view to_string(Activation kind) {
  switch (kind) {
    case Activation::PReLU:
      return "prelu";
    case Activation::SuperExpressive:
      return "super-expressive";
  }
  return "unknown";
}

Activation activation_from_string(std::string_view name) {
  if (name == "prelu") return Activation::PReLU;
  if (name == "super-expressive" || name == "super_expressive") return Activation::SuperExpressive;
  throw DomainError("unknown activation '" + std::string(name) + "'");
}

double super_expressive_base(double x) noexcept {
  if (x >= 0.0) {
    double r = std::fmod(x, 2.0);
    return r < 0.0 ? r + 2.0 : r;
  }
  return x / (std::fabs(x) + 1.0);
}

double activate(Activation kind, double x, double alpha) noexcept {
  return kind == Activation::PReLU ? prelu(x, alpha) : super_expressive(x, alpha);
}

double activation_dx(Activation kind, double x, double alpha) noexcept {
  if (kind == Activation::PReLU) return x >= 0.0 ? 1.0 : alpha;
  const double base_dx = x >= 0.0 ? 1.0 : 1.0 / ((1.0 - x) * (1.0 - x));
  return alpha + (1.0 - alpha) * base_dx;
}

double activation_dalpha(Activation kind, double x, double /*alpha*/) noexcept {
  if (kind == Activation::PReLU) return x >= 0.0 ? 0.0 : x;
  return x - super_expressive_base(x);
}

}  // namespace np
