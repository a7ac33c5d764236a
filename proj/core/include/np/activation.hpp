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
#pragma once

#include <cstdint>
#include <string_view>

namespace np {

enum class Activation : std::uint8_t {
  PReLU = 0,
  SuperExpressive = 1,
};

std::string_view to_string(Activation kind);
Activation activation_from_string(std::string_view name);

/// Trainable PReLU: x for x >= 0, alpha * x otherwise. alpha = 1 is the identity.
inline double prelu(double x, double alpha) noexcept { return x >= 0.0 ? x : alpha * x; }

/// The fixed super-expressive nonlinearity: (x mod 2) in [0, 2) on x >= 0 and
/// x / (|x| + 1) on x < 0. Periodic with period 2 on the non-negative axis.
double super_expressive_base(double x) noexcept;

/// Trainable super-expressive activation alpha * x + (1 - alpha) * base(x).
inline double super_expressive(double x, double alpha) noexcept {
  return alpha * x + (1.0 - alpha) * super_expressive_base(x);
}

double activate(Activation kind, double x, double alpha) noexcept;

// Derivatives used by backpropagation. At the PReLU kink (x == 0) the positive
// branch is taken, and the sawtooth of the super-expressive base is
// differentiated piecewise (slope 1 between jumps).
double activation_dx(Activation kind, double x, double alpha) noexcept;
double activation_dalpha(Activation kind, double x, double alpha) noexcept;

}  // namespace np
