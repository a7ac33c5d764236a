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
#include <map>
#include <span>
#include <vector>

#include "np/common.hpp"

namespace np {

/// K pairwise-distinct points in R^n, stored as the columns of an n x K
/// matrix. Their (lowest-index-priority) Voronoi cells partition R^n.
class PrototypeSet {
 public:
  /// Throws DomainError if there are no points, a coordinate is not finite,
  /// or two points coincide exactly.
  explicit PrototypeSet(Matrix points);

  std::size_t size() const noexcept { return static_cast<std::size_t>(points_.cols()); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(points_.rows()); }
  const Matrix& points() const noexcept { return points_; }
  auto point(std::size_t i) const { return points_.col(static_cast<Eigen::Index>(i)); }

  friend bool operator==(const PrototypeSet& a, const PrototypeSet& b) {
    return a.points_.rows() == b.points_.rows() && a.points_.cols() == b.points_.cols() &&
           a.points_ == b.points_;
  }

 private:
  Matrix points_;
};

/// Axis-aligned box, one (low, high) pair per coordinate.
struct Bounds {
  Vector low;
  Vector high;

  std::size_t dim() const noexcept { return static_cast<std::size_t>(low.size()); }
  /// Componentwise min/max over the columns of `samples`.
  static Bounds of(const Matrix& samples);
};

double squared_distance(const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b);

/// Index of the nearest prototype; ties go to the lowest index, which is
/// exactly the disjointified cell C_i = C~_i minus the earlier cells.
std::size_t assign(const Eigen::Ref<const Vector>& x, const PrototypeSet& protos);
std::vector<std::size_t> assign_all(const Matrix& samples, const PrototypeSet& protos);

/// Euclidean distances from x to every prototype.
Vector prototype_distances(const Eigen::Ref<const Vector>& x, const PrototypeSet& protos);

/// softmax(-distance / temperature), stabilised by subtracting the maximum logit.
Vector softmax_routing(const Eigen::Ref<const Vector>& x, const PrototypeSet& protos,
                       double temperature = 1.0);
Vector softmax_of_negative(const Eigen::Ref<const Vector>& distances, double temperature);

/// K points drawn i.i.d. uniform in `bounds`, redrawn when two coincide.
PrototypeSet init_prototypes(const Bounds& bounds, std::size_t count, std::uint64_t seed,
                             std::size_t max_retries = 64);

struct KMeansOptions {
  std::size_t max_iters = 100;
  double tol = 1e-6;
};

struct KMeansResult {
  PrototypeSet centroids;
  std::vector<std::size_t> assignment;
  /// Inertia (sum of squared distances to the assigned centroid) after each assignment step.
  std::vector<double> inertia;
  std::size_t iterations = 0;
};

/// Lloyd iterations from k-means++ seeding. Samples are the columns of
/// `features`. Empty clusters are re-seeded with the point farthest from its
/// current centroid. Throws DomainError with fewer than K distinct samples.
KMeansResult kmeans(const Matrix& features, std::size_t count, std::uint64_t seed,
                    const KMeansOptions& options = {});

/// Number of distinct columns.
std::size_t distinct_columns(const Matrix& samples);

/// Per-cell class tallies: histogram[cell][label] = count.
using CellHistogram = std::vector<std::map<int, std::size_t>>;

CellHistogram cell_histogram(std::span<const std::size_t> assignment, std::span<const int> labels,
                             std::size_t cells);

}  // namespace np
