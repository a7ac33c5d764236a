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
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "np/adam.hpp"
#include "np/bench_data.hpp"
#include "np/losses.hpp"
#include "np/mlp.hpp"
#include "np/partition.hpp"
#include "np/routing_tree.hpp"

namespace np {

struct TrainConfig {
  AdamOptions adam{};
  std::size_t batch_size = 64;
  std::size_t stage1_epochs = 20;
  /// Each pathway sees about 1/K of the data, so K times the baseline epochs
  /// gives every network the same number of optimiser steps.
  std::size_t stage2_epochs = 240;
  std::size_t baseline_epochs = 60;
  double temperature = 0.1;
  /// Cosine decay of the learning rate over each training run, ending at
  /// adam.lr * final_lr_ratio. 1 keeps the rate constant.
  double final_lr_ratio = 0.01;
  double noise_scale = 1e-3;
  std::size_t insert_count = 2;
  LossKind loss = LossKind::MSE;
  std::uint64_t seed = 0;
  /// Stage-1 architecture; the pathway width is also the baseline's base width w.
  std::size_t width = 64;
  std::size_t shallow_hidden_layers = 1;
  Activation activation = Activation::PReLU;
  double activation_slope = 0.25;
  /// Whether activation slopes receive gradient updates.
  bool train_slopes = true;
  /// Worker threads for per-cell training.
  std::size_t jobs = 1;

  /// Hidden layers of a pathway after deepening.
  std::size_t pathway_hidden_layers() const noexcept { return shallow_hidden_layers + insert_count; }
  /// Adam options for `epoch` of a run lasting `epochs` epochs.
  AdamOptions adam_at(std::size_t epoch, std::size_t epochs) const;
  void validate() const;
};

/// K prototypes with one network each; all networks share input and output width.
struct PathwayEnsemble {
  PrototypeSet protos;
  std::vector<MlpParams> nets;

  std::size_t size() const noexcept { return nets.size(); }
  void validate() const;
};

struct LossRecord {
  std::size_t epoch = 0;
  int stage = 0;   // 1: prototype discovery, 2: per-cell training, 0: baseline
  long cell = -1;  // -1 when the loss covers every cell
  double loss = 0.0;
};

struct TrainReport {
  std::vector<LossRecord> losses;
  std::vector<std::size_t> cell_counts;
  std::vector<std::size_t> empty_cells;
  std::vector<std::pair<std::string, double>> metrics;

  void append(const TrainReport& other);
};

/// CSV with header "epoch,stage,cell,loss".
void write_report_csv(std::ostream& out, const TrainReport& report);

struct EnergyResult {
  double loss = 0.0;
  std::vector<GradientBuffer> net_grads;
  Matrix prototype_grads;  // n x K
};

/// Mean over `batch` of loss(sum_i w_i(x) f_i(x), y) with
/// w(x) = softmax(-|x - p_i| / temperature), and its exact gradient with
/// respect to every network parameter and every prototype coordinate. The
/// distance gradient at x == p_i is taken as 0.
EnergyResult energy_loss(const Dataset& batch, const PathwayEnsemble& ensemble, LossKind loss,
                         double temperature, std::span<const double> class_weights = {});

/// Stage 1: uniform prototypes within the data bounds and shallow networks,
/// optimised jointly with Adam on energy_loss.
std::pair<PathwayEnsemble, TrainReport> discover_prototypes(const Dataset& data, std::size_t count,
                                                            const TrainConfig& config);

/// Stage 1 alternative for structured feature spaces: k-means centroids and
/// freshly initialised networks at full pathway depth.
PathwayEnsemble kmeans_ensemble(const Dataset& data, std::size_t count, const TrainConfig& config);

/// Inserts config.insert_count identity layers into every network.
PathwayEnsemble deepen_ensemble(const PathwayEnsemble& ensemble, const TrainConfig& config);

/// Stage 2: each network is trained only on the training samples of its own
/// Voronoi cell. Cells are independent tasks run on up to config.jobs
/// threads; cell k draws randomness only from (seed, k), so the result does
/// not depend on scheduling. Networks of empty cells are returned unchanged.
std::pair<PathwayEnsemble, TrainReport> train_pathways(const Dataset& data,
                                                       const PathwayEnsemble& ensemble,
                                                       const TrainConfig& config);

/// Width of the baseline: round(w * sqrt(K)).
std::size_t baseline_width(std::size_t width, std::size_t count);

/// A single network of pathway depth and width round(w sqrt(K)) trained on all data.
std::pair<MlpParams, TrainReport> train_baseline(const Dataset& data, std::size_t count,
                                                 const TrainConfig& config);

/// Minibatch Adam on the samples `indices` of `data`; returns the mean training loss per epoch.
std::vector<double> train_network(MlpParams& net, const Dataset& data,
                                  std::span<const std::size_t> indices, LossKind loss,
                                  std::span<const double> class_weights, std::size_t epochs,
                                  const TrainConfig& config, std::uint64_t seed);

/// Stage 1, deepening and stage 2 in sequence.
std::pair<PathwayEnsemble, TrainReport> train_neural_pathways(const Dataset& data, std::size_t count,
                                                              const TrainConfig& config);

struct Router {
  enum class Kind { BruteForce, Tree };
  Kind kind = Kind::BruteForce;
  const RoutingTree* tree = nullptr;
  /// With a tree router, fall back to the exhaustive search so results always
  /// match the brute-force router.
  bool exact = false;

  static Router brute_force() { return {}; }
  static Router with_tree(const RoutingTree& t, bool exact = false) { return {Kind::Tree, &t, exact}; }
};

struct Routed {
  std::size_t cell = 0;
  std::size_t queries = 0;
};

Routed route(const PathwayEnsemble& ensemble, const Eigen::Ref<const Vector>& x, const Router& router);

/// Prediction of the single pathway selected for x.
Vector infer(const PathwayEnsemble& ensemble, const Eigen::Ref<const Vector>& x,
             const Router& router = Router::brute_force());
/// infer() for every column of `inputs`, batched per cell.
Matrix predict(const PathwayEnsemble& ensemble, const Matrix& inputs,
               const Router& router = Router::brute_force());

enum class Metric { MSE, Accuracy };

/// MSE: mean over samples of the componentwise mean squared error.
/// Accuracy: fraction of samples whose largest logit is the label (lowest index on ties).
double evaluate_predictions(const Matrix& predictions, const Dataset& test, Metric metric);
double evaluate(const PathwayEnsemble& ensemble, const Dataset& test, Metric metric,
                const Router& router = Router::brute_force());
double evaluate(const MlpParams& net, const Dataset& test, Metric metric);

/// Affine normalisation of regression targets fitted on a training split.
struct TargetScaling {
  Vector mean;
  Vector scale;

  static TargetScaling fit(const Matrix& targets);
  Dataset apply(const Dataset& data) const;
  /// Rewrites the output layer so the network predicts unnormalised targets.
  void fold_into(MlpParams& net) const;
};

}  // namespace np
