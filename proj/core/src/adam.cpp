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
#include "np/adam.hpp"

#include <cmath>
#include <string>

namespace np {
namespace {

template <typename Param, typename Grad, typename Moment>
void update_array(Param& p, const Grad& g, Moment& m, Moment& v, const AdamOptions& o,
                  double step_size, double bias2_sqrt) {
  m = o.beta1 * m + (1.0 - o.beta1) * g;
  v = o.beta2 * v + (1.0 - o.beta2) * g.cwiseProduct(g);
  p.array() -= step_size * m.array() / (v.array().sqrt() / bias2_sqrt + o.eps);
}

void check_options(const AdamOptions& o) {
  if (!(o.lr > 0.0) || !(o.beta1 >= 0.0 && o.beta1 < 1.0) || !(o.beta2 >= 0.0 && o.beta2 < 1.0) ||
      !(o.eps > 0.0))
    throw DomainError("invalid Adam hyperparameters");
}

}  // namespace

OptimizerState OptimizerState::for_params(const MlpParams& params) {
  return {GradientBuffer::zeros_like(params), GradientBuffer::zeros_like(params), 0};
}

MatrixMoments MatrixMoments::zeros_like(const Matrix& param) {
  return {Matrix::Zero(param.rows(), param.cols()), Matrix::Zero(param.rows(), param.cols()), 0};
}

void adam_update(MlpParams& params, const GradientBuffer& grads, OptimizerState& state,
                 const AdamOptions& options) {
  check_options(options);
  if (grads.layers.size() != params.layers.size() ||
      state.first.layers.size() != params.layers.size() ||
      state.second.layers.size() != params.layers.size())
    throw ShapeError("optimizer state or gradient does not match network depth");
  for (std::size_t j = 0; j < params.layers.size(); ++j) {
    const auto& p = params.layers[j];
    const auto& g = grads.layers[j];
    if (g.weight.rows() != p.weight.rows() || g.weight.cols() != p.weight.cols() ||
        g.bias.size() != p.bias.size() || g.slopes.has_value() != p.slopes.has_value() ||
        (p.slopes && g.slopes->size() != p.slopes->size()))
      throw ShapeError("gradient layer " + std::to_string(j) + " does not match parameters");
  }
  if (!grads.all_finite())
    throw NumericError("Adam update rejected: gradient contains non-finite entries");

  const auto t = static_cast<double>(state.step + 1);
  const double step_size = options.lr / (1.0 - std::pow(options.beta1, t));
  const double bias2_sqrt = std::sqrt(1.0 - std::pow(options.beta2, t));
  for (std::size_t j = 0; j < params.layers.size(); ++j) {
    auto& p = params.layers[j];
    const auto& g = grads.layers[j];
    auto& m = state.first.layers[j];
    auto& v = state.second.layers[j];
    update_array(p.weight, g.weight, m.weight, v.weight, options, step_size, bias2_sqrt);
    update_array(p.bias, g.bias, m.bias, v.bias, options, step_size, bias2_sqrt);
    if (p.slopes)
      update_array(*p.slopes, *g.slopes, *m.slopes, *v.slopes, options, step_size, bias2_sqrt);
  }
  ++state.step;
}

void adam_update(Matrix& param, const Matrix& grad, MatrixMoments& state,
                 const AdamOptions& options) {
  check_options(options);
  if (grad.rows() != param.rows() || grad.cols() != param.cols() ||
      state.first.rows() != param.rows() || state.first.cols() != param.cols())
    throw ShapeError("matrix gradient does not match parameter shape");
  if (!grad.allFinite())
    throw NumericError("Adam update rejected: gradient contains non-finite entries");
  const auto t = static_cast<double>(state.step + 1);
  const double step_size = options.lr / (1.0 - std::pow(options.beta1, t));
  const double bias2_sqrt = std::sqrt(1.0 - std::pow(options.beta2, t));
  update_array(param, grad, state.first, state.second, options, step_size, bias2_sqrt);
  ++state.step;
}

std::pair<MlpParams, OptimizerState> adam_step(const MlpParams& params,
                                               const GradientBuffer& grads,
                                               const OptimizerState& state,
                                               const AdamOptions& options) {
  std::pair<MlpParams, OptimizerState> out{params, state};
  adam_update(out.first, grads, out.second, options);
  return out;
}

}  // namespace np
