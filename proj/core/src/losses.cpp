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
#include "np/losses.hpp"

#include <cmath>

namespace np {

LossKind loss_from_string(const std::string& name) {
  if (name == "mse") return LossKind::MSE;
  if (name == "ce" || name == "ce-unweighted") return LossKind::CrossEntropy;
  if (name == "ce-weighted") return LossKind::WeightedCrossEntropy;
  throw DomainError("unknown loss '" + name + "' (expected mse, ce-unweighted or ce-weighted)");
}

std::string to_string(LossKind kind) {
  switch (kind) {
    case LossKind::MSE:
      return "mse";
    case LossKind::CrossEntropy:
      return "ce-unweighted";
    case LossKind::WeightedCrossEntropy:
      return "ce-weighted";
  }
  return "unknown";
}

double mse(const Eigen::Ref<const Vector>& pred, const Eigen::Ref<const Vector>& target) {
  if (pred.size() != target.size() || pred.size() == 0)
    throw ShapeError("mse needs equal, non-empty prediction and target sizes");
  return (pred - target).squaredNorm() / static_cast<double>(pred.size());
}

double cross_entropy(const Eigen::Ref<const Vector>& logits, int label, double weight) {
  if (label < 0 || label >= logits.size())
    throw DomainError("label " + std::to_string(label) + " outside [0, " +
                      std::to_string(logits.size()) + ")");
  const double top = logits.maxCoeff();
  const double lse = top + std::log((logits.array() - top).exp().sum());
  return weight * (lse - logits[label]);
}

BatchLoss mse_batch(const Matrix& pred, const Matrix& targets) {
  if (pred.rows() != targets.rows() || pred.cols() != targets.cols() || pred.size() == 0)
    throw ShapeError("mse batch shapes differ");
  const double count = static_cast<double>(pred.size());
  BatchLoss out;
  const Matrix diff = pred - targets;
  out.value = diff.squaredNorm() / count;
  out.grad = diff * (2.0 / count);
  return out;
}

BatchLoss cross_entropy_batch(const Matrix& logits, std::span<const int> labels,
                              std::span<const double> class_weights) {
  if (static_cast<std::size_t>(logits.cols()) != labels.size() || labels.empty())
    throw ShapeError("cross-entropy batch: label count differs from logits");
  if (!class_weights.empty() && class_weights.size() != static_cast<std::size_t>(logits.rows()))
    throw ShapeError("cross-entropy batch: one weight per class required");
  const double batch = static_cast<double>(labels.size());
  BatchLoss out;
  out.grad.resize(logits.rows(), logits.cols());
  for (Eigen::Index c = 0; c < logits.cols(); ++c) {
    const int label = labels[static_cast<std::size_t>(c)];
    if (label < 0 || label >= logits.rows())
      throw DomainError("label " + std::to_string(label) + " outside [0, " +
                        std::to_string(logits.rows()) + ")");
    const double w = class_weights.empty() ? 1.0 : class_weights[static_cast<std::size_t>(label)];
    const auto z = logits.col(c);
    const double top = z.maxCoeff();
    const Vector e = (z.array() - top).exp().matrix();
    const double sum = e.sum();
    out.value += w * (top + std::log(sum) - z[label]);
    out.grad.col(c) = e * (w / (sum * batch));
    out.grad(label, c) -= w / batch;
  }
  out.value /= batch;
  return out;
}

std::map<int, double> class_weights(const std::map<int, std::size_t>& histogram) {
  std::size_t total = 0;
  std::size_t present = 0;
  for (const auto& [label, count] : histogram) {
    total += count;
    if (count > 0) ++present;
  }
  if (total == 0) throw DomainError("class weights of an empty cell");
  std::map<int, double> out;
  for (const auto& [label, count] : histogram)
    out[label] = count == 0 ? 0.0
                            : static_cast<double>(total) /
                                  (static_cast<double>(present) * static_cast<double>(count));
  return out;
}

std::vector<double> class_weight_vector(const std::map<int, std::size_t>& histogram,
                                        std::size_t classes) {
  std::vector<double> dense(classes, 0.0);
  for (const auto& [label, w] : class_weights(histogram)) {
    if (label < 0 || static_cast<std::size_t>(label) >= classes)
      throw DomainError("class label out of range in histogram");
    dense[static_cast<std::size_t>(label)] = w;
  }
  return dense;
}

}  // namespace np
