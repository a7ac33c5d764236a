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

#include <map>
#include <span>
#include <string>
#include <vector>

#include "np/common.hpp"

namespace np {

enum class LossKind {
  MSE,
  CrossEntropy,          // unweighted
  WeightedCrossEntropy,  // per-cell inverse-frequency class weights
};

LossKind loss_from_string(const std::string& name);
std::string to_string(LossKind kind);
inline bool is_classification_loss(LossKind kind) { return kind != LossKind::MSE; }

/// Mean squared componentwise error.
double mse(const Eigen::Ref<const Vector>& pred, const Eigen::Ref<const Vector>& target);

/// weight * (-log softmax(logits)[label]), computed with the log-sum-exp shift.
double cross_entropy(const Eigen::Ref<const Vector>& logits, int label, double weight = 1.0);

struct BatchLoss {
  double value = 0.0;  // mean over the batch
  Matrix grad;         // d value / d prediction, same shape as the prediction
};

BatchLoss mse_batch(const Matrix& pred, const Matrix& targets);
/// `class_weights` empty means every class has weight 1.
BatchLoss cross_entropy_batch(const Matrix& logits, std::span<const int> labels,
                              std::span<const double> class_weights = {});

/// weight_c = total / (#present classes * count_c) for classes present in the
/// cell, so the weights average to 1 over those classes. Throws DomainError
/// for an empty cell.
std::map<int, double> class_weights(const std::map<int, std::size_t>& histogram);

/// Dense form of class_weights; classes missing from the cell get weight 0.
std::vector<double> class_weight_vector(const std::map<int, std::size_t>& histogram,
                                        std::size_t classes);

}  // namespace np
