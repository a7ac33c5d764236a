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
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "np/common.hpp"
#include "np/partition.hpp"

namespace np {

/// Samples are columns. Regression sets carry `targets` (m x N); classification
/// sets carry integer `labels` in [0, classes).
struct Dataset {
  Matrix inputs;
  Matrix targets;
  std::vector<int> labels;
  std::size_t classes = 0;

  std::size_t size() const noexcept { return static_cast<std::size_t>(inputs.cols()); }
  std::size_t input_dim() const noexcept { return static_cast<std::size_t>(inputs.rows()); }
  bool is_classification() const noexcept { return classes > 0; }
  /// Network output width: m for regression, the class count for classification.
  std::size_t output_dim() const noexcept {
    return is_classification() ? classes : static_cast<std::size_t>(targets.rows());
  }
  Bounds bounds() const { return Bounds::of(inputs); }

  void validate() const;
  Dataset subset(std::span<const std::size_t> indices) const;
};

/// 20 + e - 20 exp(-0.2 sqrt(mean x_i^2)) - exp(mean cos(2 pi x_i)).
double ackley(const Eigen::Ref<const Vector>& x);
/// sum x_i^2 + 10 (n - sum cos(2 pi x_i)).
double rastrigin(const Eigen::Ref<const Vector>& x);

/// Fractional Brownian motion with Hurst index `hurst` sampled at
/// t_j = j / (count - 1), B(0) = 0, by Cholesky factorisation of the exact
/// covariance (s^2H + t^2H - |t - s|^2H) / 2.
Vector fbm_path(double hurst, std::size_t count, std::uint64_t seed);

/// Long paths: consecutive segments of at most `chunk` steps are each sampled
/// exactly (via self-similarity) and joined end to end. Increments in
/// different segments are independent, so long-range correlation across
/// segment boundaries is dropped. Equal to fbm_path when count - 1 <= chunk.
Vector fbm_path_chunked(double hurst, std::size_t count, std::size_t chunk, std::uint64_t seed);

/// Size cap for generated grids: NP_SIZE_CAP from the environment, else 10^7.
std::size_t default_size_cap();

/// The s^n vertices of the regular grid on [a, b]^n in lexicographic order
/// (last coordinate varies fastest), as an n x s^n matrix.
Matrix regular_grid(double a, double b, std::size_t n, std::size_t s,
                    std::size_t size_cap = default_size_cap());

enum class BenchFunction { Ackley, Rastrigin };
BenchFunction bench_function_from_string(const std::string& name);
std::string to_string(BenchFunction fn);

/// Regression dataset on the grid with targets fn(x).
Dataset make_function_dataset(BenchFunction fn, double a, double b, std::size_t n, std::size_t s);
/// 1-D regression dataset: the grid on [0, 1] with count points and an fBm path as target.
Dataset make_fbm_dataset(double hurst, std::size_t count, std::size_t chunk, std::uint64_t seed);

/// Seeded uniform shuffle, then the first round(ratio * N) samples form the training part.
std::pair<Dataset, Dataset> split(const Dataset& data, double ratio, std::uint64_t seed);
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(std::size_t count,
                                                                            double ratio,
                                                                            std::uint64_t seed);

/// Isotropic unit-variance Gaussian classes whose means are the vertices of a
/// regular simplex with pairwise distance `separation`. Requires dim >= classes.
Dataset gaussian_mixture(std::size_t classes, std::size_t dim, std::size_t per_class,
                         double separation, std::uint64_t seed);

/// Feature files: a header line "npf <dim> <classes>" followed by one sample per
/// line, "label f_1 ... f_dim", space separated.
Dataset load_features(const std::filesystem::path& path);
Dataset read_features(std::istream& in);
void save_features(const std::filesystem::path& path, const Dataset& data);
void write_features(std::ostream& out, const Dataset& data);

/// CSV with header x0,...,x{n-1} followed by y (m == 1), y0..y{m-1}, or label.
void write_csv(std::ostream& out, const Dataset& data);
void save_csv(const std::filesystem::path& path, const Dataset& data);
Dataset read_csv(std::istream& in, std::size_t classes = 0);
/// Reads `path`; a classification file takes its class count from the
/// "<path>.json" metadata when present, otherwise from the largest label.
Dataset load_csv(const std::filesystem::path& path);

}  // namespace np
