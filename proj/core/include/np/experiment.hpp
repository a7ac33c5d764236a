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
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "np/bench_data.hpp"
#include "np/trainer.hpp"

namespace np {

/// Regression target family.
struct RegressionTask {
  enum class Kind { Function, Fbm };
  Kind kind = Kind::Function;
  BenchFunction function = BenchFunction::Ackley;
  std::size_t dim = 2;
  std::size_t grid = 150;  // s; the fBm path length for Kind::Fbm
  double low = -1.0;
  double high = 1.0;
  double hurst = 0.3;
  std::size_t fbm_chunk = 1000;

  std::string name() const;
  /// Grid functions ignore `seed`; an fBm path is drawn from it.
  Dataset make(std::uint64_t seed) const;
};

/// Comparison protocol shared by regression and classification runs.
struct Protocol {
  std::size_t prototypes = 4;
  double train_ratio = 0.8;
  TrainConfig config;
  /// Regression: standardise targets on the training split and fold the
  /// scaling back into every output layer.
  bool standardize_targets = true;
};

struct RegressionOutcome {
  std::uint64_t seed = 0;
  double pathways_mse = 0.0;
  double baseline_mse = 0.0;
  double seconds = 0.0;
};

/// The train/test split used by every protocol run with this seed.
std::pair<Dataset, Dataset> protocol_split(const Dataset& data, double ratio, std::uint64_t seed);

/// One seed: split, train pathways and the width round(w sqrt K) baseline, score test MSE.
RegressionOutcome run_regression(const Dataset& data, const Protocol& protocol, std::uint64_t seed);

struct ClassificationTask {
  std::size_t classes = 8;
  std::size_t dim = 16;
  std::size_t per_class = 1000;
  double separation = 4.5;
  /// Precomputed features; replaces the synthetic mixture when set.
  std::optional<Dataset> features;

  Dataset make(std::uint64_t seed) const;
};

struct ClassificationOutcome {
  std::uint64_t seed = 0;
  double weighted_accuracy = 0.0;
  double unweighted_accuracy = 0.0;
  double baseline_accuracy = 0.0;
  double seconds = 0.0;
};

/// One seed: k-means prototypes, pathways trained with weighted and with
/// unweighted cross-entropy, and a cross-entropy baseline.
ClassificationOutcome run_classification(const Dataset& data, const Protocol& protocol,
                                         std::uint64_t seed);

struct Summary {
  double mean = 0.0;
  double stddev = 0.0;  // population standard deviation; 0 for one value
  std::size_t count = 0;
};
Summary summarize(const std::vector<double>& values);

/// Settings used by the command-line benchmarks and the acceptance runs.
Protocol default_regression_protocol();
Protocol default_classification_protocol();

}  // namespace np
