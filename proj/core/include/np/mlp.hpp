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

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <vector>

#include "np/activation.hpp"
#include "np/common.hpp"

namespace np {

/// Layer widths (d_0, ..., d_{J+1}) of a dense network with J hidden layers.
class MultiIndex {
 public:
  explicit MultiIndex(std::vector<std::size_t> dims);
  MultiIndex(std::initializer_list<std::size_t> dims)
      : MultiIndex(std::vector<std::size_t>(dims)) {}

  const std::vector<std::size_t>& dims() const noexcept { return dims_; }
  std::size_t operator[](std::size_t i) const { return dims_.at(i); }
  std::size_t size() const noexcept { return dims_.size(); }

  std::size_t input_dim() const noexcept { return dims_.front(); }
  std::size_t output_dim() const noexcept { return dims_.back(); }
  std::size_t hidden_layers() const noexcept { return dims_.size() - 2; }
  std::size_t layer_count() const noexcept { return dims_.size() - 1; }

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;

 private:
  std::vector<std::size_t> dims_;
};

/// Parameters of one affine map followed (except on the output layer) by a
/// componentwise trainable activation with one slope per output unit.
struct LayerParams {
  Matrix weight;                 // d_out x d_in
  Vector bias;                   // d_out
  std::optional<Vector> slopes;  // d_out, absent on the output layer

  std::size_t in_dim() const noexcept { return static_cast<std::size_t>(weight.cols()); }
  std::size_t out_dim() const noexcept { return static_cast<std::size_t>(weight.rows()); }
  std::size_t scalar_count() const noexcept {
    return static_cast<std::size_t>(weight.size() + bias.size() + (slopes ? slopes->size() : 0));
  }
};

struct MlpParams {
  MultiIndex index;
  std::vector<LayerParams> layers;
  Activation activation = Activation::PReLU;

  std::size_t input_dim() const noexcept { return index.input_dim(); }
  std::size_t output_dim() const noexcept { return index.output_dim(); }
  /// Number of scalars actually stored (the output layer carries no slopes).
  std::size_t stored_scalar_count() const noexcept;
};

/// Gradient of a scalar with respect to every entry of an MlpParams; same layout.
struct GradientBuffer {
  std::vector<LayerParams> layers;

  static GradientBuffer zeros_like(const MlpParams& params);
  GradientBuffer& operator+=(const GradientBuffer& other);
  GradientBuffer& operator*=(double factor);
  bool all_finite() const;
};

/// Throws ShapeError or NumericError when the invariants of `params` fail.
void validate(const MlpParams& params);

/// Parameter count P([d]) = sum_j d_j (d_{j+1} + 2), as used in the size
/// estimates. It differs from stored_param_count because the output layer has
/// no slopes and the per-layer term is indexed by fan-in.
std::size_t param_count(const MultiIndex& index);
/// Exact number of stored scalars: sum_j d_{j+1} (d_j + 1) plus one slope per hidden unit.
std::size_t stored_param_count(const MultiIndex& index);
/// P([d]) restricted to hidden-to-hidden maps (j = 1 .. J-1).
std::size_t hidden_param_count(const MultiIndex& index);

/// Activations recorded by a batched forward pass for reuse by backward_batch.
struct ForwardTrace {
  std::vector<Matrix> inputs;  // x^(j), one matrix per layer, samples as columns
  std::vector<Matrix> pre;     // A^(j) x^(j) + b^(j) for hidden layers
};

Vector mlp_forward(const MlpParams& params, const Eigen::Ref<const Vector>& x);
/// Evaluates every column of `inputs` (d_0 x B); returns d_{J+1} x B.
Matrix forward_batch(const MlpParams& params, const Eigen::Ref<const Matrix>& inputs);
Matrix forward_batch(const MlpParams& params, const Eigen::Ref<const Matrix>& inputs,
                     ForwardTrace& trace);

/// Exact gradient of upstream^T * mlp_forward(params, x).
GradientBuffer mlp_backward(const MlpParams& params, const Eigen::Ref<const Vector>& x,
                            const Eigen::Ref<const Vector>& upstream);
/// Sum over columns of the per-sample gradients of upstream[:, b]^T * f(x_b).
GradientBuffer backward_batch(const MlpParams& params, const ForwardTrace& trace,
                              const Eigen::Ref<const Matrix>& upstream);

enum class InitScheme {
  GlorotUniform,  // weights U(+-sqrt(6 / (fan_in + fan_out))), biases 0
  Zeros,
};

struct InitOptions {
  InitScheme scheme = InitScheme::GlorotUniform;
  Activation activation = Activation::PReLU;
  double slope = 0.25;
};

MlpParams init_mlp(const MultiIndex& index, std::uint64_t seed, const InitOptions& options = {});

/// Inserts `insert_count` square layers of width d_J right before the output
/// layer. Each starts as the identity (weight I, bias 0, slopes 1) plus
/// N(0, noise_scale^2) noise; with noise_scale == 0 the network computes
/// exactly the same function as before.
MlpParams deepen(const MlpParams& params, std::size_t insert_count, double noise_scale,
                 std::uint64_t seed);

/// Parameters in layer order: weight (column-major), bias, slopes.
std::vector<double> flatten(const std::vector<LayerParams>& layers);
void unflatten(std::vector<LayerParams>& layers, std::span<const double> values);

}  // namespace np
