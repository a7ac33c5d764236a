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
#include <utility>

#include "np/mlp.hpp"

namespace np {

/// Adam hyperparameters; defaults follow the usual framework defaults.
struct AdamOptions {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct OptimizerState {
  GradientBuffer first;
  GradientBuffer second;
  std::uint64_t step = 0;

  static OptimizerState for_params(const MlpParams& params);
};

/// First/second moments for a plain matrix parameter (e.g. prototype coordinates).
struct MatrixMoments {
  Matrix first;
  Matrix second;
  std::uint64_t step = 0;

  static MatrixMoments zeros_like(const Matrix& param);
};

/// In-place Adam update. A non-finite gradient throws NumericError and leaves
/// both `params` and `state` untouched.
void adam_update(MlpParams& params, const GradientBuffer& grads, OptimizerState& state,
                 const AdamOptions& options);
void adam_update(Matrix& param, const Matrix& grad, MatrixMoments& state,
                 const AdamOptions& options);

/// Value-returning form of adam_update.
std::pair<MlpParams, OptimizerState> adam_step(const MlpParams& params,
                                               const GradientBuffer& grads,
                                               const OptimizerState& state,
                                               const AdamOptions& options);

}  // namespace np
