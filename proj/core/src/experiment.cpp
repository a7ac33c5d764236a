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
#include "np/experiment.hpp"

#include <chrono>
#include <cmath>

#include "np/rng.hpp"

namespace np {
namespace {

// Streams of the per-seed protocol, disjoint from the training streams.
constexpr std::uint64_t kDataStream = 101;
constexpr std::uint64_t kSplitStream = 102;

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

std::string RegressionTask::name() const {
  if (kind == Kind::Fbm) return "fbm";
  return to_string(function);
}

Dataset RegressionTask::make(std::uint64_t seed) const {
  if (kind == Kind::Fbm) return make_fbm_dataset(hurst, grid, fbm_chunk, derive_seed(seed, kDataStream));
  return make_function_dataset(function, low, high, dim, grid);
}

std::pair<Dataset, Dataset> protocol_split(const Dataset& data, double ratio, std::uint64_t seed) {
  return split(data, ratio, derive_seed(seed, kSplitStream));
}

RegressionOutcome run_regression(const Dataset& data, const Protocol& protocol, std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  TrainConfig config = protocol.config;
  config.seed = seed;
  config.loss = LossKind::MSE;
  auto [train, test] = protocol_split(data, protocol.train_ratio, seed);

  std::optional<TargetScaling> scaling;
  if (protocol.standardize_targets) {
    scaling = TargetScaling::fit(train.targets);
    train = scaling->apply(train);
  }

  auto [ensemble, report] = train_neural_pathways(train, protocol.prototypes, config);
  auto [baseline, baseline_report] = train_baseline(train, protocol.prototypes, config);
  if (scaling) {
    for (auto& net : ensemble.nets) scaling->fold_into(net);
    scaling->fold_into(baseline);
  }

  RegressionOutcome out;
  out.seed = seed;
  out.pathways_mse = evaluate(ensemble, test, Metric::MSE);
  out.baseline_mse = evaluate(baseline, test, Metric::MSE);
  out.seconds = seconds_since(start);
  return out;
}

Dataset ClassificationTask::make(std::uint64_t seed) const {
  if (features) return *features;
  return gaussian_mixture(classes, dim, per_class, separation, derive_seed(seed, kDataStream));
}

ClassificationOutcome run_classification(const Dataset& data, const Protocol& protocol,
                                         std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  TrainConfig config = protocol.config;
  config.seed = seed;
  const auto [train, test] = protocol_split(data, protocol.train_ratio, seed);

  const PathwayEnsemble initial = kmeans_ensemble(train, protocol.prototypes, config);
  ClassificationOutcome out;
  out.seed = seed;

  config.loss = LossKind::WeightedCrossEntropy;
  out.weighted_accuracy = evaluate(train_pathways(train, initial, config).first, test, Metric::Accuracy);
  config.loss = LossKind::CrossEntropy;
  out.unweighted_accuracy = evaluate(train_pathways(train, initial, config).first, test, Metric::Accuracy);
  out.baseline_accuracy =
      evaluate(train_baseline(train, protocol.prototypes, config).first, test, Metric::Accuracy);
  out.seconds = seconds_since(start);
  return out;
}

Summary summarize(const std::vector<double>& values) {
  Summary s;
  s.count = values.size();
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  double sq = 0.0;
  for (double v : values) sq += (v - s.mean) * (v - s.mean);
  s.stddev = std::sqrt(sq / static_cast<double>(values.size()));
  return s;
}

Protocol default_regression_protocol() {
  Protocol p;
  p.config.width = 64;
  p.config.shallow_hidden_layers = 1;
  p.config.insert_count = 2;
  return p;
}

Protocol default_classification_protocol() {
  Protocol p;
  p.config.width = 64;
  p.config.shallow_hidden_layers = 1;
  p.config.insert_count = 2;
  p.config.loss = LossKind::WeightedCrossEntropy;
  return p;
}

}  // namespace np
