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
#include "np/mlp.hpp"

#include <cmath>
#include <string>

#include "np/rng.hpp"

namespace np {
namespace {

std::string dims_string(const std::vector<std::size_t>& dims) {
  std::string out = "(";
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(dims[i]);
  }
  return out + ")";
}

void apply_activation(Activation kind, const Matrix& pre, const Vector& slopes, Matrix& out) {
  out.resize(pre.rows(), pre.cols());
  if (kind == Activation::PReLU) {
    for (Eigen::Index c = 0; c < pre.cols(); ++c) {
      for (Eigen::Index r = 0; r < pre.rows(); ++r) {
        const double z = pre(r, c);
        out(r, c) = z >= 0.0 ? z : slopes[r] * z;
      }
    }
    return;
  }
  for (Eigen::Index c = 0; c < pre.cols(); ++c)
    for (Eigen::Index r = 0; r < pre.rows(); ++r)
      out(r, c) = super_expressive(pre(r, c), slopes[r]);
}

bool finite(const Matrix& m) { return m.allFinite(); }

}  // namespace

MultiIndex::MultiIndex(std::vector<std::size_t> dims) : dims_(std::move(dims)) {
  if (dims_.size() < 2)
    throw ShapeError("multi-index needs at least input and output widths, got " +
                     dims_string(dims_));
  for (auto d : dims_)
    if (d == 0) throw ShapeError("multi-index entries must be positive: " + dims_string(dims_));
}

std::size_t MlpParams::stored_scalar_count() const noexcept {
  std::size_t total = 0;
  for (const auto& layer : layers) total += layer.scalar_count();
  return total;
}

GradientBuffer GradientBuffer::zeros_like(const MlpParams& params) {
  GradientBuffer g;
  g.layers.reserve(params.layers.size());
  for (const auto& layer : params.layers) {
    LayerParams z;
    z.weight = Matrix::Zero(layer.weight.rows(), layer.weight.cols());
    z.bias = Vector::Zero(layer.bias.size());
    if (layer.slopes) z.slopes = Vector::Zero(layer.slopes->size());
    g.layers.push_back(std::move(z));
  }
  return g;
}

GradientBuffer& GradientBuffer::operator+=(const GradientBuffer& other) {
  if (other.layers.size() != layers.size()) throw ShapeError("gradient buffers differ in depth");
  for (std::size_t j = 0; j < layers.size(); ++j) {
    layers[j].weight += other.layers[j].weight;
    layers[j].bias += other.layers[j].bias;
    if (layers[j].slopes) *layers[j].slopes += *other.layers[j].slopes;
  }
  return *this;
}

GradientBuffer& GradientBuffer::operator*=(double factor) {
  for (auto& layer : layers) {
    layer.weight *= factor;
    layer.bias *= factor;
    if (layer.slopes) *layer.slopes *= factor;
  }
  return *this;
}

bool GradientBuffer::all_finite() const {
  for (const auto& layer : layers) {
    if (!finite(layer.weight) || !layer.bias.allFinite()) return false;
    if (layer.slopes && !layer.slopes->allFinite()) return false;
  }
  return true;
}

void validate(const MlpParams& params) {
  const auto& dims = params.index.dims();
  if (params.layers.size() != params.index.layer_count())
    throw ShapeError("network has " + std::to_string(params.layers.size()) +
                     " layers but multi-index " + dims_string(dims) + " implies " +
                     std::to_string(params.index.layer_count()));
  for (std::size_t j = 0; j < params.layers.size(); ++j) {
    const auto& layer = params.layers[j];
    const bool is_output = j + 1 == params.layers.size();
    if (layer.in_dim() != dims[j] || layer.out_dim() != dims[j + 1] ||
        static_cast<std::size_t>(layer.bias.size()) != dims[j + 1])
      throw ShapeError("layer " + std::to_string(j) + " does not match multi-index " +
                       dims_string(dims));
    if (is_output && layer.slopes)
      throw ShapeError("output layer must not carry activation slopes");
    if (!is_output && (!layer.slopes || static_cast<std::size_t>(layer.slopes->size()) != dims[j + 1]))
      throw ShapeError("hidden layer " + std::to_string(j) + " needs one slope per unit");
    if (!finite(layer.weight) || !layer.bias.allFinite() ||
        (layer.slopes && !layer.slopes->allFinite()))
      throw NumericError("layer " + std::to_string(j) + " has non-finite parameters");
  }
}

std::size_t param_count(const MultiIndex& index) {
  const auto& d = index.dims();
  std::size_t total = 0;
  for (std::size_t j = 0; j + 1 < d.size(); ++j) total += d[j] * (d[j + 1] + 2);
  return total;
}

std::size_t stored_param_count(const MultiIndex& index) {
  const auto& d = index.dims();
  std::size_t total = 0;
  for (std::size_t j = 0; j + 1 < d.size(); ++j) {
    total += d[j + 1] * (d[j] + 1);
    if (j + 2 < d.size()) total += d[j + 1];
  }
  return total;
}

std::size_t hidden_param_count(const MultiIndex& index) {
  const auto& d = index.dims();
  std::size_t total = 0;
  for (std::size_t j = 1; j + 2 < d.size(); ++j) total += d[j] * (d[j + 1] + 2);
  return total;
}

Matrix forward_batch(const MlpParams& params, const Eigen::Ref<const Matrix>& inputs,
                     ForwardTrace& trace) {
  if (static_cast<std::size_t>(inputs.rows()) != params.input_dim())
    throw ShapeError("input has dimension " + std::to_string(inputs.rows()) +
                     ", network expects " + std::to_string(params.input_dim()));
  const std::size_t count = params.layers.size();
  trace.inputs.resize(count);
  trace.pre.resize(count - 1);
  trace.inputs[0] = inputs;
  for (std::size_t j = 0; j + 1 < count; ++j) {
    const auto& layer = params.layers[j];
    Matrix& z = trace.pre[j];
    z.noalias() = layer.weight * trace.inputs[j];
    z.colwise() += layer.bias;
    apply_activation(params.activation, z, *layer.slopes, trace.inputs[j + 1]);
  }
  const auto& out = params.layers.back();
  Matrix y = out.weight * trace.inputs[count - 1];
  y.colwise() += out.bias;
  return y;
}

Matrix forward_batch(const MlpParams& params, const Eigen::Ref<const Matrix>& inputs) {
  if (static_cast<std::size_t>(inputs.rows()) != params.input_dim())
    throw ShapeError("input has dimension " + std::to_string(inputs.rows()) +
                     ", network expects " + std::to_string(params.input_dim()));
  Matrix x = inputs;
  Matrix z;
  for (std::size_t j = 0; j + 1 < params.layers.size(); ++j) {
    const auto& layer = params.layers[j];
    z.noalias() = layer.weight * x;
    z.colwise() += layer.bias;
    apply_activation(params.activation, z, *layer.slopes, x);
  }
  const auto& out = params.layers.back();
  Matrix y = out.weight * x;
  y.colwise() += out.bias;
  return y;
}

Vector mlp_forward(const MlpParams& params, const Eigen::Ref<const Vector>& x) {
  return forward_batch(params, x);
}

GradientBuffer backward_batch(const MlpParams& params, const ForwardTrace& trace,
                              const Eigen::Ref<const Matrix>& upstream) {
  const std::size_t count = params.layers.size();
  if (trace.inputs.size() != count || trace.pre.size() + 1 != count)
    throw ShapeError("forward trace does not belong to this network");
  if (static_cast<std::size_t>(upstream.rows()) != params.output_dim() ||
      upstream.cols() != trace.inputs[0].cols())
    throw ShapeError("upstream gradient has shape " + std::to_string(upstream.rows()) + "x" +
                     std::to_string(upstream.cols()) + ", expected " +
                     std::to_string(params.output_dim()) + "x" +
                     std::to_string(trace.inputs[0].cols()));

  GradientBuffer grads;
  grads.layers.resize(count);
  Matrix delta = upstream;  // d loss / d (layer output pre-activation)
  for (std::size_t jj = count; jj-- > 0;) {
    const auto& layer = params.layers[jj];
    auto& g = grads.layers[jj];
    if (jj + 1 < count) {
      const Matrix& z = trace.pre[jj];
      const Vector& slopes = *layer.slopes;
      Vector dslopes = Vector::Zero(slopes.size());
      for (Eigen::Index c = 0; c < z.cols(); ++c) {
        for (Eigen::Index r = 0; r < z.rows(); ++r) {
          const double up = delta(r, c);
          dslopes[r] += up * activation_dalpha(params.activation, z(r, c), slopes[r]);
          delta(r, c) = up * activation_dx(params.activation, z(r, c), slopes[r]);
        }
      }
      g.slopes = std::move(dslopes);
    }
    g.weight.noalias() = delta * trace.inputs[jj].transpose();
    g.bias = delta.rowwise().sum();
    if (jj > 0) {
      Matrix next = layer.weight.transpose() * delta;
      delta = std::move(next);
    }
  }
  return grads;
}

GradientBuffer mlp_backward(const MlpParams& params, const Eigen::Ref<const Vector>& x,
                            const Eigen::Ref<const Vector>& upstream) {
  ForwardTrace trace;
  forward_batch(params, x, trace);
  return backward_batch(params, trace, upstream);
}

MlpParams init_mlp(const MultiIndex& index, std::uint64_t seed, const InitOptions& options) {
  Rng rng(seed);
  MlpParams params{index, {}, options.activation};
  const auto& d = index.dims();
  params.layers.reserve(index.layer_count());
  for (std::size_t j = 0; j + 1 < d.size(); ++j) {
    LayerParams layer;
    layer.weight = Matrix::Zero(static_cast<Eigen::Index>(d[j + 1]), static_cast<Eigen::Index>(d[j]));
    layer.bias = Vector::Zero(static_cast<Eigen::Index>(d[j + 1]));
    if (options.scheme == InitScheme::GlorotUniform) {
      const double limit = std::sqrt(6.0 / static_cast<double>(d[j] + d[j + 1]));
      // row-major draw order so the stream does not depend on storage order
      for (Eigen::Index r = 0; r < layer.weight.rows(); ++r)
        for (Eigen::Index c = 0; c < layer.weight.cols(); ++c)
          layer.weight(r, c) = rng.uniform(-limit, limit);
    }
    if (j + 2 < d.size())
      layer.slopes = Vector::Constant(static_cast<Eigen::Index>(d[j + 1]), options.slope);
    params.layers.push_back(std::move(layer));
  }
  return params;
}

MlpParams deepen(const MlpParams& params, std::size_t insert_count, double noise_scale,
                 std::uint64_t seed) {
  if (insert_count < 1) throw DomainError("deepen needs insert_count >= 1");
  if (!(noise_scale >= 0.0) || !std::isfinite(noise_scale))
    throw DomainError("deepen needs a finite noise_scale >= 0");
  if (params.layers.empty()) throw ShapeError("cannot deepen a network without layers");
  validate(params);

  Rng rng(seed);
  auto noise = [&] { return noise_scale == 0.0 ? 0.0 : rng.normal(0.0, noise_scale); };

  const auto& dims = params.index.dims();
  const std::size_t width = dims[dims.size() - 2];
  const auto w = static_cast<Eigen::Index>(width);

  std::vector<std::size_t> new_dims(dims.begin(), dims.end() - 1);
  new_dims.insert(new_dims.end(), insert_count, width);
  new_dims.push_back(dims.back());

  MlpParams out{MultiIndex(std::move(new_dims)), {}, params.activation};
  out.layers.assign(params.layers.begin(), params.layers.end() - 1);
  for (std::size_t k = 0; k < insert_count; ++k) {
    LayerParams layer;
    layer.weight = Matrix::Identity(w, w);
    layer.bias = Vector::Zero(w);
    layer.slopes = Vector::Ones(w);
    for (Eigen::Index r = 0; r < w; ++r)
      for (Eigen::Index c = 0; c < w; ++c) layer.weight(r, c) += noise();
    for (Eigen::Index r = 0; r < w; ++r) layer.bias[r] += noise();
    for (Eigen::Index r = 0; r < w; ++r) (*layer.slopes)[r] += noise();
    out.layers.push_back(std::move(layer));
  }
  out.layers.push_back(params.layers.back());
  return out;
}

std::vector<double> flatten(const std::vector<LayerParams>& layers) {
  std::vector<double> out;
  for (const auto& layer : layers) {
    out.insert(out.end(), layer.weight.data(), layer.weight.data() + layer.weight.size());
    out.insert(out.end(), layer.bias.data(), layer.bias.data() + layer.bias.size());
    if (layer.slopes)
      out.insert(out.end(), layer.slopes->data(), layer.slopes->data() + layer.slopes->size());
  }
  return out;
}

void unflatten(std::vector<LayerParams>& layers, std::span<const double> values) {
  std::size_t pos = 0;
  auto take = [&](double* dst, Eigen::Index n) {
    if (pos + static_cast<std::size_t>(n) > values.size())
      throw ShapeError("flat parameter vector is too short");
    std::copy_n(values.data() + pos, n, dst);
    pos += static_cast<std::size_t>(n);
  };
  for (auto& layer : layers) {
    take(layer.weight.data(), layer.weight.size());
    take(layer.bias.data(), layer.bias.size());
    if (layer.slopes) take(layer.slopes->data(), layer.slopes->size());
  }
  if (pos != values.size()) throw ShapeError("flat parameter vector is too long");
}

}  // namespace np
